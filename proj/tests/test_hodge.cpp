#include <catch2/catch_amalgamated.hpp>

#include "phgeom/hodge.hpp"
#include "phgeom/structures.hpp"
#include "support.hpp"

using namespace phgeom;
using namespace phtest;

namespace {

MetricField flat_split(const ChartPtr& chart) {
  std::array<std::array<Expression, 4>, 4> e;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      e[i][j] = make_const(i == j ? (i < 2 ? 1.0 : -1.0) : 0.0);
  return MetricField::from_upper_triangle(chart, e);
}

// random split-signature metric: A^T diag(1,1,-1,-1) A with A = I + small sym
MetricField wiggly_split(const ChartPtr& chart, double eps) {
  Expression x = make_coord(0, "x"), y = make_coord(1, "y");
  Expression u = make_coord(2, "u"), v = make_coord(3, "v");
  // conformal-plus-offdiagonal deformation keeping signature (2,2) for small eps
  Expression f = make_add({make_const(1.0),
                           make_mul({make_const(eps), make_unary(Op::Sin, make_add({x, v}))})});
  Expression h = make_mul({make_const(eps), make_unary(Op::Cos, make_add({y, u}))});
  std::array<std::array<Expression, 4>, 4> e;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) e[i][j] = make_const(0.0);
  e[0][0] = f;
  e[1][1] = f;
  e[2][2] = make_neg(f);
  e[3][3] = make_neg(f);
  e[0][1] = h;
  e[2][3] = h;
  return MetricField::from_upper_triangle(chart, e);
}

}  // namespace

TEST_CASE("hodge star on the flat split metric") {
  auto chart = chart_xyuv();
  MetricField g = flat_split(chart);
  std::array<double, 4> pt{0.1, 0.2, 0.3, 0.4};
  Mat4 G = g(pt.data(), {});

  SECTION("star of 1 is plus-or-minus vol, consistent with star(vol)") {
    FormValue one;
    one.degree = 0;
    one.c[0] = 1.0;
    FormValue s = hodge_star_value(one, G);
    REQUIRE(std::abs(s.c[0xF] - cplx(1.0, 0.0)) < 1e-14);
    FormValue vol;
    vol.degree = 4;
    vol.c[0xF] = 1.0;
    FormValue sv = hodge_star_value(vol, G);
    // star(vol) = sign(det g) = +1 for split signature (det > 0)
    REQUIRE(std::abs(sv.c[0] - cplx(1.0, 0.0)) < 1e-14);
  }
  SECTION("star(dx^dy) = s du^dv with s = +-1 fixed by the involution") {
    FormValue b;
    b.degree = 2;
    b.c[0b0011] = 1.0;
    FormValue s = hodge_star_value(b, G);
    REQUIRE(std::abs(std::abs(s.c[0b1100]) - 1.0) < 1e-14);
    for (int m = 0; m < 16; ++m)
      if (m != 0b1100) REQUIRE(std::abs(s.c[m]) < 1e-14);
    FormValue ss = hodge_star_value(s, G);
    REQUIRE(std::abs(ss.c[0b0011] - b.c[0b0011]) < 1e-14);  // involution on 2-forms
  }
}

TEST_CASE("star-star involution identity for wiggly split metrics") {
  auto chart = chart_xyuv();
  MetricField g = wiggly_split(chart, 0.2);
  auto pts = box_points(7, 25);
  std::uint64_t ctr = 0;
  for (int deg = 0; deg <= 4; ++deg) {
    auto f = random_form(chart, deg, 800 + deg, ctr, 1);
    double want = ((deg * (4 - deg)) % 2 == 0) ? 1.0 : -1.0;  // sign(det g) = +1
    for (auto& p : pts) {
      Mat4 G = g(p.data(), {});
      FormValue v = evaluate(f, p.data(), {});
      FormValue ss = hodge_star_value(hodge_star_value(v, G), G);
      for (int m = 0; m < 16; ++m)
        REQUIRE(std::abs(ss.c[m] - want * v.c[m]) < 1e-9 * (1.0 + std::abs(v.c[m])));
    }
  }
}

TEST_CASE("codifferential is the formal adjoint of d on a periodic box") {
  // flat split metric, trig forms with unit periods; uniform-grid quadrature
  // is exact for the trigonometric polynomials involved.
  auto chart = chart_xyuv();
  MetricField g = flat_split(chart);
  auto trig = [&](std::uint64_t seed, std::uint64_t& ctr, int degree) {
    DifferentialForm f = DifferentialForm::zero(degree, chart);
    for (int m = 0; m < 16; ++m) {
      if (mask_degree(static_cast<Mask>(m)) != degree) continue;
      // c0 + c1 sin(2pi xi) + c2 cos(2pi xj)
      int i = static_cast<int>(uniform_at(seed, ctr++) * 4) % 4;
      int j = static_cast<int>(uniform_at(seed, ctr++) * 4) % 4;
      Expression arg_i = make_mul({make_const(2.0 * 3.14159265358979323846),
                                   make_coord(i, chart->coords[i])});
      Expression arg_j = make_mul({make_const(2.0 * 3.14159265358979323846),
                                   make_coord(j, chart->coords[j])});
      f.set(static_cast<Mask>(m),
            make_add({make_const(uniform_at(seed, ctr++) - 0.5),
                      make_mul({make_const(uniform_at(seed, ctr++) - 0.5),
                                make_unary(Op::Sin, arg_i)}),
                      make_mul({make_const(uniform_at(seed, ctr++) - 0.5),
                                make_unary(Op::Cos, arg_j)})}));
    }
    return f;
  };
  const int N = 6;
  std::vector<std::array<double, 4>> grid;
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      for (int c = 0; c < N; ++c)
        for (int d = 0; d < N; ++d)
          grid.push_back({a / double(N), b / double(N), c / double(N), d / double(N)});

  std::uint64_t ctr = 0;
  for (int k = 1; k <= 4; ++k) {
    auto alpha = trig(900 + k, ctr, k - 1);
    auto beta = trig(950 + k, ctr, k);
    auto dalpha = exterior_derivative(alpha);
    cplx lhs{0.0, 0.0}, rhs{0.0, 0.0};
    for (auto& p : grid) {
      Mat4 G = g(p.data(), {});
      FormValue da = evaluate(dalpha, p.data(), {});
      FormValue bv = evaluate(beta, p.data(), {});
      lhs += form_inner_value(da, bv, G);
      FormValue av = evaluate(alpha, p.data(), {});
      FormValue db = codifferential_at(beta, g, p, 1e-3, {});
      rhs += form_inner_value(av, db, G);
    }
    lhs /= static_cast<double>(grid.size());
    rhs /= static_cast<double>(grid.size());
    INFO("degree " << k);
    REQUIRE(std::abs(lhs - rhs) < 1e-8);
  }
}

TEST_CASE("codifferential trivial cases") {
  auto chart = chart_xyuv();
  MetricField g = flat_split(chart);
  std::array<double, 4> pt{0.3, -0.1, 0.2, 0.5};
  SECTION("delta(dx) = 0") {
    DifferentialForm dx = DifferentialForm::zero(1, chart).set(0b0001, make_const(1.0));
    FormValue v = codifferential_at(dx, g, pt);
    REQUIRE(v.max_abs() < 1e-12);
  }
  SECTION("delta of a constant-coefficient 2-form = 0") {
    DifferentialForm f = DifferentialForm::zero(2, chart)
                             .set(0b0011, make_const(2.0))
                             .set(0b0110, make_const(cplx(0.5, -1.0)))
                             .set(0b1100, make_const(-1.0));
    FormValue v = codifferential_at(f, g, pt);
    REQUIRE(v.max_abs() < 1e-12);
  }
}

TEST_CASE("dc operator follows the fixed convention") {
  auto chart = chart_xyuv();
  EndomorphismField J = EndomorphismField::constant(chart, flat_I_matrix());
  auto pts = box_points(71, 20);
  SECTION("d^c on functions: d^c psi = -J d psi") {
    DifferentialForm psi = DifferentialForm::zero(0, chart)
                               .set(0, parse_expression("sin(x)*cos(y) + u*v", *chart));
    auto dc = dc_operator(psi, J);
    // (d^c psi)(e_k) = (d psi)(J e_k)
    auto dpsi = exterior_derivative(psi);
    for (auto& p : pts) {
      FormValue dc_v = evaluate(dc, p.data(), {});
      FormValue d_v = evaluate(dpsi, p.data(), {});
      Mat4 Jm = J(p.data(), {});
      for (int k = 0; k < 4; ++k) {
        cplx expect{0.0, 0.0};
        for (int l = 0; l < 4; ++l) expect += d_v.c[1u << l] * Jm[l][k];
        REQUIRE(std::abs(dc_v.c[1u << k] - expect) < 1e-12);
      }
    }
  }
  SECTION("dd^c annihilates pluriharmonic-type functions") {
    // psi = x^2 - y^2 is harmonic in (x, y): dd^c psi = 0 for constant J
    DifferentialForm psi = DifferentialForm::zero(0, chart)
                               .set(0, parse_expression("x^2 - y^2 + u - v", *chart));
    auto ddc = ddc_operator(psi, J);
    REQUIRE(max_form_residual(ddc, pts) < 1e-12);
  }
}
