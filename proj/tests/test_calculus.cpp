#include <catch2/catch_amalgamated.hpp>

#include "phgeom/forms.hpp"
#include "support.hpp"

using namespace phgeom;
using namespace phtest;

namespace {

// Inoue S+ frame forms on the upper-half chart with t2 = 1, alpha > 1.
struct SPlusForms {
  DifferentialForm a1, a2, a3, a4;
};

SPlusForms splus_forms(const ChartPtr& chart, double alpha, double t2) {
  Expression y = make_coord(1, "y"), v = make_coord(3, "v");
  Expression coeff = make_div(
      make_sub(y, make_mul({make_const(t2), make_div(make_unary(Op::Ln, v),
                                                     make_const(std::log(alpha)))})),
      v);
  SPlusForms f;
  f.a1 = DifferentialForm::zero(1, chart);
  f.a1.set(0b0001, make_const(1.0));
  f.a1.set(0b0100, make_neg(coeff));
  f.a2 = DifferentialForm::zero(1, chart);
  f.a2.set(0b0010, make_const(1.0));
  f.a2.set(0b1000, make_neg(coeff));
  f.a3 = DifferentialForm::zero(1, chart);
  f.a3.set(0b0100, make_div(make_const(1.0), v));
  f.a4 = DifferentialForm::zero(1, chart);
  f.a4.set(0b1000, make_div(make_const(1.0), v));
  return f;
}

}  // namespace

TEST_CASE("wedge basics") {
  auto chart = chart_xyuv();
  DifferentialForm dx = DifferentialForm::zero(1, chart).set(0b0001, make_const(1.0));
  DifferentialForm dy = DifferentialForm::zero(1, chart).set(0b0010, make_const(1.0));
  SECTION("dx ^ dx = 0") {
    REQUIRE(wedge(dx, dx).coeffs.empty());
  }
  SECTION("antisymmetry on 1-forms") {
    auto ab = wedge(dx, dy);
    auto ba = wedge(dy, dx);
    auto pts = box_points(3, 5);
    REQUIRE(max_form_residual(add(ab, ba), pts) < 1e-15);
  }
  SECTION("degree overflow") {
    auto vol = DifferentialForm::zero(4, chart).set(0b1111, make_const(1.0));
    REQUIRE_THROWS_AS(wedge(vol, dx), std::invalid_argument);
  }
}

TEST_CASE("S+ frame identities carried by the exterior derivative") {
  auto chart = chart_upper_half();
  double alpha = (3.0 + std::sqrt(5.0)) / 2.0;
  SPlusForms f = splus_forms(chart, alpha, 1.0);
  auto pts = box_points(11, 40, {-1, -1, -1, 0.5}, {1, 1, 1, 2.0});

  SECTION("d a4 = 0") {
    REQUIRE(max_form_residual(exterior_derivative(f.a4), pts) < 1e-12);
  }
  SECTION("d a3 = a3 ^ a4") {
    auto lhs = exterior_derivative(f.a3);
    auto rhs = wedge(f.a3, f.a4);
    REQUIRE(max_form_residual(sub(lhs, rhs), pts) < 1e-12);
  }
  SECTION("(a1^a3 + a2^a4) ^ (a1^a3 - a2^a4) = 0") {
    auto o1 = add(wedge(f.a1, f.a3), wedge(f.a2, f.a4));
    auto o2 = sub(wedge(f.a1, f.a3), wedge(f.a2, f.a4));
    REQUIRE(max_form_residual(wedge(o1, o2), pts) < 1e-12);
  }
  SECTION("d(x dy) = dx ^ dy") {
    DifferentialForm xdy = DifferentialForm::zero(1, chart).set(0b0010, make_coord(0, "x"));
    auto d = exterior_derivative(xdy);
    REQUIRE(d.coeffs.size() == 1);
    double p0[4] = {0.3, 0.1, 0.2, 1.0};
    REQUIRE(evaluate(d, p0, {}).c[0b0011].real() == Catch::Approx(1.0));
  }
}

TEST_CASE("omega2 squared for the exponential-phase form") {
  // Omega2 + i Omega3 = e^{i phi} dz ^ dw; Omega2^2 = -1/2 dz^dzbar^dw^dwbar.
  auto chart = chart_xyuv();
  Expression phi = parse_expression("sin(2*pi*x)*cos(2*pi*y)", *chart);
  Expression eiphi = make_unary(Op::Exp, make_mul({make_const(cplx(0.0, 1.0)), phi}));
  auto dz = complex_coordinate_differential(chart, "z");
  auto dw = complex_coordinate_differential(chart, "w");
  auto omega = scale(wedge(dz, dw), eiphi);
  auto o2 = scale(add(omega, conj(omega)), cplx(0.5, 0.0));
  auto lhs = wedge(o2, o2);
  auto dzb = complex_coordinate_differential(chart, "z", true);
  auto dwb = complex_coordinate_differential(chart, "w", true);
  auto rhs = scale(wedge(wedge(dz, dzb), wedge(dw, dwb)), cplx(-0.5, 0.0));
  auto pts = box_points(17, 50);
  REQUIRE(max_form_residual(sub(lhs, rhs), pts) < 1e-12);
}

TEST_CASE("pullback") {
  auto chart = chart_c2();
  SECTION("scaling map multiplies dz1^dz2 by |a|^2") {
    cplx a(1.2, 0.7);
    SmoothMap m;
    m.source = chart;
    m.target = chart;
    // (z1, z2) -> (a z1, conj(a) z2) in real coordinates
    Expression x1 = make_coord(0, "x1"), y1 = make_coord(1, "y1");
    Expression x2 = make_coord(2, "x2"), y2 = make_coord(3, "y2");
    m.comp[0] = make_sub(make_mul({make_const(a.real()), x1}), make_mul({make_const(a.imag()), y1}));
    m.comp[1] = make_add({make_mul({make_const(a.imag()), x1}), make_mul({make_const(a.real()), y1})});
    m.comp[2] = make_add({make_mul({make_const(a.real()), x2}), make_mul({make_const(a.imag()), y2})});
    m.comp[3] = make_sub(make_mul({make_const(a.real()), y2}), make_mul({make_const(a.imag()), x2}));
    auto dz1 = complex_coordinate_differential(chart, "z1");
    auto dz2 = complex_coordinate_differential(chart, "z2");
    auto form = wedge(dz1, dz2);
    auto pb = pullback(m, form);
    auto expect = scale(form, cplx(std::norm(a), 0.0));
    auto pts = box_points(23, 30);
    REQUIRE(max_form_residual(sub(pb, expect), pts) < 1e-12);
  }
  SECTION("identity map") {
    SmoothMap id;
    id.source = chart;
    id.target = chart;
    for (int i = 0; i < 4; ++i) id.comp[i] = make_coord(i, chart->coords[i]);
    std::uint64_t ctr = 0;
    auto f = random_form(chart, 2, 99, ctr);
    auto pts = box_points(29, 20);
    REQUIRE(max_form_residual(sub(pullback(id, f), f), pts) < 1e-12);
  }
  SECTION("g0 translation-scaling leaves the S+ coframe invariant") {
    auto hchart = chart_upper_half();
    double alpha = (3.0 + std::sqrt(5.0)) / 2.0;
    SPlusForms f = splus_forms(hchart, alpha, 1.0);
    // g0(z, w) = (z + i, alpha w) : x->x, y->y+1, u->alpha u, v->alpha v
    SmoothMap g0;
    g0.source = hchart;
    g0.target = hchart;
    g0.comp[0] = make_coord(0, "x");
    g0.comp[1] = make_add({make_coord(1, "y"), make_const(1.0)});
    g0.comp[2] = make_mul({make_const(alpha), make_coord(2, "u")});
    g0.comp[3] = make_mul({make_const(alpha), make_coord(3, "v")});
    auto pts = box_points(31, 40, {-1, -1, -1, 0.5}, {1, 1, 1, 2.0});
    REQUIRE(max_form_residual(sub(pullback(g0, f.a1), f.a1), pts) < 1e-12);
    REQUIRE(max_form_residual(sub(pullback(g0, f.a2), f.a2), pts) < 1e-12);
    REQUIRE(max_form_residual(sub(pullback(g0, f.a3), f.a3), pts) < 1e-12);
    REQUIRE(max_form_residual(sub(pullback(g0, f.a4), f.a4), pts) < 1e-12);
  }
}

TEST_CASE("interior product and Lie derivative") {
  auto chart = chart_xyuv();
  DifferentialForm dx = DifferentialForm::zero(1, chart).set(0b0001, make_const(1.0));
  DifferentialForm dy = DifferentialForm::zero(1, chart).set(0b0010, make_const(1.0));
  auto pts = box_points(37, 20);
  SECTION("i_dx (dx ^ dy) = dy") {
    VectorField ex = VectorField::basis(0, chart);
    auto r = interior_product(ex, wedge(dx, dy));
    REQUIRE(max_form_residual(sub(r, dy), pts) < 1e-15);
  }
  SECTION("complex frame: i_dz (gamma dz ^ dwbar) = gamma dwbar") {
    VectorField dz_vec{{make_const(0.5), make_const(cplx(0.0, -0.5)), make_const(0.0),
                        make_const(0.0)},
                       chart};
    Expression gamma = parse_expression("exp(0.3*sin(x))", *chart);
    auto dz = complex_coordinate_differential(chart, "z");
    auto dwb = complex_coordinate_differential(chart, "w", true);
    auto r = interior_product(dz_vec, scale(wedge(dz, dwb), gamma));
    auto expect = scale(dwb, gamma);
    REQUIRE(max_form_residual(sub(r, expect), pts) < 1e-12);
  }
  SECTION("interior product of a 0-form vanishes") {
    DifferentialForm f = DifferentialForm::zero(0, chart).set(0, make_coord(0, "x"));
    VectorField ex = VectorField::basis(0, chart);
    REQUIRE(interior_product(ex, f).coeffs.empty());
  }
  SECTION("L_dx (x dx) = dx") {
    DifferentialForm xdx = DifferentialForm::zero(1, chart).set(0b0001, make_coord(0, "x"));
    VectorField ex = VectorField::basis(0, chart);
    auto r = lie_derivative(ex, xdx);
    REQUIRE(max_form_residual(sub(r, dx), pts) < 1e-15);
  }
  SECTION("L_dz of the constant-gamma Kaehler-type form vanishes") {
    VectorField dz_vec{{make_const(0.5), make_const(cplx(0.0, -0.5)), make_const(0.0),
                        make_const(0.0)},
                       chart};
    cplx gamma(1.0, 0.0);
    auto dz = complex_coordinate_differential(chart, "z");
    auto dzb = complex_coordinate_differential(chart, "z", true);
    auto dw = complex_coordinate_differential(chart, "w");
    auto dwb = complex_coordinate_differential(chart, "w", true);
    auto omega = scale(add(scale(wedge(dz, dwb), gamma), scale(wedge(dw, dzb), std::conj(gamma))),
                       cplx(0.0, -1.0));
    auto r = lie_derivative(dz_vec, omega);
    REQUIRE(max_form_residual(r, pts) < 1e-15);
  }
  SECTION("L_0 a = 0") {
    VectorField zero{{make_const(0.0), make_const(0.0), make_const(0.0), make_const(0.0)}, chart};
    std::uint64_t ctr = 0;
    auto f = random_form(chart, 2, 41, ctr);
    REQUIRE(max_form_residual(lie_derivative(zero, f), pts) < 1e-15);
  }
}

TEST_CASE("exterior calculus laws on seeded random forms") {
  auto chart = chart_xyuv();
  auto pts = box_points(101, 6);
  SmoothMap m = curved_test_map(chart);
  std::uint64_t ctr = 0;
  int forms_tested = 0;
  for (int trial = 0; trial < 200; ++trial) {
    int dega = trial % 3;            // 0,1,2
    int degb = (trial / 3) % 2 + 1;  // 1,2
    auto a = random_form(chart, dega, 555, ctr);
    auto b = random_form(chart, degb, 556, ctr);
    auto x = random_vector_field(chart, 557, ctr, 1);
    ++forms_tested;

    auto dda = exterior_derivative(exterior_derivative(a));
    REQUIRE(max_form_residual(dda, pts) < 1e-9);

    if (dega + degb <= 3) {
      auto lhs = exterior_derivative(wedge(a, b));
      auto rhs = add(wedge(exterior_derivative(a), b),
                     scale(wedge(a, exterior_derivative(b)), cplx(dega % 2 == 0 ? 1.0 : -1.0)));
      REQUIRE(max_form_residual(sub(lhs, rhs), pts) < 1e-9);
    }
    auto nat_d = sub(pullback(m, exterior_derivative(a)), exterior_derivative(pullback(m, a)));
    REQUIRE(max_form_residual(nat_d, pts) < 1e-9);
    if (dega + degb <= 4) {
      auto nat_w = sub(pullback(m, wedge(a, b)), wedge(pullback(m, a), pullback(m, b)));
      REQUIRE(max_form_residual(nat_w, pts) < 1e-9);
    }
    if (dega >= 1) {
      auto lie = lie_derivative(x, a);
      auto expl = add(exterior_derivative(interior_product(x, a)),
                      interior_product(x, exterior_derivative(a)));
      REQUIRE(max_form_residual(sub(lie, expl), pts) < 1e-9);
    }
  }
  REQUIRE(forms_tested == 200);
}

TEST_CASE("graded commutativity of the wedge") {
  auto chart = chart_xyuv();
  auto pts = box_points(103, 8);
  std::uint64_t ctr = 0;
  for (int trial = 0; trial < 30; ++trial) {
    int dega = trial % 3, degb = (trial / 3) % 3;
    if (dega + degb > 4) continue;
    auto a = random_form(chart, dega, 600, ctr);
    auto b = random_form(chart, degb, 601, ctr);
    double sign = (dega * degb) % 2 == 0 ? 1.0 : -1.0;
    auto resid = sub(wedge(a, b), scale(wedge(b, a), cplx(sign, 0.0)));
    REQUIRE(max_form_residual(resid, pts) < 1e-9);
  }
}
