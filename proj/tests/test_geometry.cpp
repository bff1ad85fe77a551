#include <catch2/catch_amalgamated.hpp>

#include "phgeom/geometry.hpp"
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

MetricField walker_abc(const ChartPtr& chart, const char* a, const char* b, const char* c) {
  return walker_metric(parse_field(a, chart), parse_field(b, chart), parse_field(c, chart));
}

// Finite-difference Koszul oracle for the Christoffel symbols.
Connection::Gamma fd_koszul(const MetricField& g, const std::array<double, 4>& pt,
                            double h = 1e-4) {
  double dg[4][4][4];
  for (int l = 0; l < 4; ++l)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        auto f = [&](std::array<double, 4> q) { return g(q.data(), {})[i][j].real(); };
        dg[l][i][j] = fd_derivative(f, pt, l, h);
      }
  Mat4 Ginv = mat_inverse(g(pt.data(), {}));
  Connection::Gamma out{};
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        double s = 0.0;
        for (int l = 0; l < 4; ++l)
          s += Ginv[k][l].real() * (dg[i][l][j] + dg[j][l][i] - dg[l][i][j]);
        out[k][i][j] = 0.5 * s;
      }
  return out;
}

EndomorphismField rotated_product_structure(const ChartPtr& chart, const char* angle_expr) {
  Expression two_ang = make_mul({make_const(2.0), parse_expression(angle_expr, *chart)});
  EndomorphismField Sp;
  Sp.chart = chart;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) Sp.a[i][j] = make_const(0.0);
  // R S R^{-1} for R = rotation by ang in the (x,y)-plane, S = diag(1,-1,1,-1)
  Sp.a[0][0] = make_unary(Op::Cos, two_ang);
  Sp.a[0][1] = make_unary(Op::Sin, two_ang);
  Sp.a[1][0] = make_unary(Op::Sin, two_ang);
  Sp.a[1][1] = make_neg(make_unary(Op::Cos, two_ang));
  Sp.a[2][2] = make_const(1.0);
  Sp.a[3][3] = make_const(-1.0);
  return Sp;
}

}  // namespace

TEST_CASE("lie brackets") {
  auto chart = chart_xyuv();
  auto pts = box_points(5, 15);
  SECTION("coordinate fields commute") {
    auto b = lie_bracket(VectorField::basis(0, chart), VectorField::basis(1, chart));
    for (auto& p : pts)
      for (int k = 0; k < 4; ++k) REQUIRE(std::abs(evaluate(b.comp[k], p.data(), {})) < 1e-15);
  }
  SECTION("antisymmetry and Jacobi on random fields") {
    std::uint64_t ctr = 0;
    for (int trial = 0; trial < 10; ++trial) {
      auto X = random_vector_field(chart, 1200, ctr, 2);
      auto Y = random_vector_field(chart, 1201, ctr, 2);
      auto Z = random_vector_field(chart, 1202, ctr, 2);
      auto anti = lie_bracket(X, Y);
      auto anti2 = lie_bracket(Y, X);
      auto jac1 = lie_bracket(X, lie_bracket(Y, Z));
      auto jac2 = lie_bracket(Y, lie_bracket(Z, X));
      auto jac3 = lie_bracket(Z, lie_bracket(X, Y));
      for (auto& p : pts)
        for (int k = 0; k < 4; ++k) {
          REQUIRE(std::abs(evaluate(anti.comp[k], p.data(), {}) +
                           evaluate(anti2.comp[k], p.data(), {})) < 1e-9);
          cplx s = evaluate(jac1.comp[k], p.data(), {}) + evaluate(jac2.comp[k], p.data(), {}) +
                   evaluate(jac3.comp[k], p.data(), {});
          REQUIRE(std::abs(s) < 1e-9);
        }
    }
  }
}

TEST_CASE("christoffel symbols") {
  auto chart = chart_xyuv();
  SECTION("flat split metric has vanishing symbols") {
    Connection c = christoffel(flat_split(chart));
    auto G = c.christoffel_at(std::array<double, 4>{0.1, 0.2, 0.3, 0.4}.data());
    for (int k = 0; k < 4; ++k)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) REQUIRE(G[k][i][j] == 0.0);
  }
  SECTION("Walker metric: Gamma^u and Gamma^v vanish; FD-Koszul cross-check") {
    MetricField g = walker_abc(chart, "sin(u)", "cos(v)", "u*v");
    Connection c = christoffel(g);
    auto pts = box_points(9, 12);
    for (auto& p : pts) {
      auto Gm = c.christoffel_at(p.data());
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          REQUIRE(std::abs(Gm[2][i][j]) < 1e-12);
          REQUIRE(std::abs(Gm[3][i][j]) < 1e-12);
        }
      auto Or = fd_koszul(g, p);
      for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) REQUIRE(std::abs(Gm[k][i][j] - Or[k][i][j]) < 1e-6);
    }
  }
  SECTION("metric compatibility") {
    MetricField g = walker_abc(chart, "sin(u)", "cos(v)", "u*v");
    Connection c = christoffel(g);
    auto pts = box_points(13, 12);
    for (auto& p : pts) REQUIRE(metric_compatibility_residual(c, p.data()) < 1e-9);
  }
}

TEST_CASE("covariant derivatives and parallel fields") {
  auto chart = chart_xyuv();
  SECTION("flat metric: nabla of a constant field vanishes") {
    Connection c = christoffel(flat_split(chart));
    VectorField ex = VectorField::basis(0, chart);
    auto nab = covariant_derivative_vector_at(c, ex, std::array<double, 4>{0, 0, 0, 0}.data());
    REQUIRE(mat_max_abs(nab) < 1e-15);
  }
  SECTION("Walker metric: dx and dy are parallel and null") {
    MetricField g = walker_abc(chart, "sin(u)", "cos(v)", "u*v");
    VectorField X = VectorField::basis(0, chart);
    VectorField Y = VectorField::basis(1, chart);
    auto pts = box_points(15, 20);
    auto rep = is_parallel_null(g, X, pts, &Y);
    REQUIRE(rep.max_nabla < 1e-12);
    REQUIRE(rep.max_norm < 1e-12);
    REQUIRE(rep.min_independence > 0.5);
  }
  SECTION("flat split metric: dx + du is parallel and null") {
    MetricField g = flat_split(chart);
    VectorField X{{make_const(1.0), make_const(0.0), make_const(1.0), make_const(0.0)}, chart};
    auto pts = box_points(17, 10);
    auto rep = is_parallel_null(g, X, pts);
    REQUIRE(rep.max_nabla < 1e-15);
    REQUIRE(rep.max_norm < 1e-15);
  }
  SECTION("Walker du is generically not null") {
    MetricField g = walker_abc(chart, "sin(u)", "cos(v)", "u*v");
    VectorField U = VectorField::basis(2, chart);
    auto pts = box_points(19, 20);
    auto rep = is_parallel_null(g, U, pts);
    REQUIRE(rep.max_norm > 0.1);  // g(du,du) = a = sin(u)
  }
  SECTION("a depending on x breaks the parallel property") {
    MetricField g = walker_abc(chart, "sin(u) + 0.5*x", "cos(v)", "u*v");
    VectorField X = VectorField::basis(0, chart);
    auto pts = box_points(21, 20);
    auto rep = is_parallel_null(g, X, pts);
    REQUIRE(rep.max_nabla > 1e-3);
  }
}

TEST_CASE("curvature") {
  auto chart = chart_xyuv();
  SECTION("flat metric is flat") {
    Connection c = christoffel(flat_split(chart));
    auto cv = curvature_at(c, std::array<double, 4>{0.3, 0.1, -0.2, 0.4}.data());
    double worst = 0.0;
    for (int k = 0; k < 4; ++k)
      for (int l = 0; l < 4; ++l)
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) worst = std::max(worst, std::abs(cv.up[k][l][i][j]));
    REQUIRE(worst < 1e-15);
  }
  SECTION("Walker metric is Ricci-flat") {
    MetricField g = walker_abc(chart, "sin(u)", "cos(v)", "u*v");
    Connection c = christoffel(g);
    auto pts = box_points(23, 15);
    for (auto& p : pts) {
      auto cv = curvature_at(c, p.data());
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) REQUIRE(std::abs(cv.ricci[i][j]) < 1e-10);
    }
  }
  SECTION("Riemann symmetries and first Bianchi for a curved metric") {
    std::array<std::array<Expression, 4>, 4> e;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) e[i][j] = make_const(0.0);
    e[0][0] = make_const(1.0);
    e[1][1] = make_const(1.0);
    e[2][2] = make_const(-1.0);
    e[3][3] = make_neg(make_unary(Op::Exp, make_mul({make_const(2.0), make_coord(2, "u")})));
    MetricField g = MetricField::from_upper_triangle(chart, e);
    Connection c = christoffel(g);
    auto pts = box_points(29, 10);
    double max_ric = 0.0;
    for (auto& p : pts) {
      auto cv = curvature_at(c, p.data());
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l)
          for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
              REQUIRE(std::abs(cv.down[k][l][i][j] + cv.down[l][k][i][j]) < 1e-8);
              REQUIRE(std::abs(cv.down[k][l][i][j] + cv.down[k][l][j][i]) < 1e-8);
              REQUIRE(std::abs(cv.down[k][l][i][j] - cv.down[i][j][k][l]) < 1e-8);
              double bianchi =
                  cv.down[k][l][i][j] + cv.down[k][i][j][l] + cv.down[k][j][l][i];
              REQUIRE(std::abs(bianchi) < 1e-8);
            }
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          REQUIRE(std::abs(cv.ricci[i][j] - cv.ricci[j][i]) < 1e-9);
          max_ric = std::max(max_ric, std::abs(cv.ricci[i][j]));
        }
    }
    REQUIRE(max_ric > 0.1);
  }
  SECTION("Ricci against a finite-difference oracle on the Christoffels") {
    std::array<std::array<Expression, 4>, 4> e;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) e[i][j] = make_const(0.0);
    e[0][0] = make_const(1.0);
    e[1][1] = make_const(1.0);
    e[2][2] = make_const(-1.0);
    e[3][3] = make_neg(make_unary(Op::Exp, make_mul({make_const(2.0), make_coord(2, "u")})));
    MetricField g = MetricField::from_upper_triangle(chart, e);
    Connection c = christoffel(g);
    auto pts = box_points(31, 6);
    for (auto& p : pts) {
      auto cv = curvature_at(c, p.data());
      auto Gm = c.christoffel_at(p.data());
      double ric_fd[4][4];
      for (int l = 0; l < 4; ++l)
        for (int j = 0; j < 4; ++j) {
          double v = 0.0;
          for (int m = 0; m < 4; ++m) {
            auto f1 = [&](std::array<double, 4> q) { return c.christoffel_at(q.data())[m][j][l]; };
            auto f2 = [&](std::array<double, 4> q) { return c.christoffel_at(q.data())[m][m][l]; };
            v += fd_derivative(f1, p, m, 1e-4) - fd_derivative(f2, p, j, 1e-4);
            for (int s = 0; s < 4; ++s) v += Gm[m][m][s] * Gm[s][j][l] - Gm[m][j][s] * Gm[s][m][l];
          }
          ric_fd[l][j] = v;
        }
      for (int l = 0; l < 4; ++l)
        for (int j = 0; j < 4; ++j) REQUIRE(std::abs(cv.ricci[l][j] - ric_fd[l][j]) < 1e-6);
    }
  }
}

TEST_CASE("nijenhuis tensor") {
  auto chart = chart_xyuv();
  auto pts = box_points(33, 10);
  SECTION("constant complex structure is integrable") {
    EndomorphismField I = EndomorphismField::constant(chart, flat_I_matrix());
    REQUIRE(nijenhuis(I).max_residual(pts) < 1e-15);
  }
  SECTION("hyperelliptic-type product structure is integrable") {
    Mat4 S{};
    S[0][0] = 1.0; S[1][1] = -1.0; S[2][2] = 1.0; S[3][3] = -1.0;
    EndomorphismField Se = EndomorphismField::constant(chart, S);
    REQUIRE(nijenhuis(Se).max_residual(pts) < 1e-15);
  }
  SECTION("position-dependent mixing of the eigenbundles breaks integrability") {
    auto Sp = rotated_product_structure(chart, "0.4*sin(2*pi*u)");
    auto ev = nijenhuis(Sp);
    REQUIRE(ev.max_residual(pts) > 0.1);
    for (auto& p : pts) {
      Mat4 m = Sp(p.data(), {});
      REQUIRE(mat_max_abs(mat_sub(mat_mul(m, m), mat_identity())) < 1e-12);
    }
  }
  SECTION("pointwise-functor path agrees with the symbolic path") {
    auto Sp = rotated_product_structure(chart, "0.4*sin(2*pi*u)");
    auto sym = nijenhuis(Sp);
    auto fd = nijenhuis(symbolic_endo(Sp));
    for (auto& p : pts)
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
          Vec4 a = sym.coordinate_pair(p, i, j);
          Vec4 b = fd.coordinate_pair(p, i, j);
          for (int k = 0; k < 4; ++k) REQUIRE(std::abs(a[k] - b[k]) < 1e-8);
        }
  }
  SECTION("tensoriality in the first slot") {
    auto Sp = rotated_product_structure(chart, "0.4*sin(2*pi*u)");
    std::uint64_t ctr = 0;
    auto X = random_vector_field(chart, 1500, ctr, 2);
    auto Y = random_vector_field(chart, 1501, ctr, 2);
    Expression f = random_bounded_expression(1502, ctr, 2);
    VectorField fX{{}, chart};
    for (int k = 0; k < 4; ++k) fX.comp[k] = make_mul({f, X.comp[k]});
    auto n_fxy = nijenhuis_apply(Sp, fX, Y);
    auto n_xy = nijenhuis_apply(Sp, X, Y);
    for (auto& p : pts) {
      cplx fv = evaluate(f, p.data(), {});
      for (int k = 0; k < 4; ++k) {
        cplx lhs = evaluate(n_fxy.comp[k], p.data(), {});
        cplx rhs = fv * evaluate(n_xy.comp[k], p.data(), {});
        REQUIRE(std::abs(lhs - rhs) < 1e-9 * (1.0 + std::abs(rhs)));
      }
    }
  }
}
