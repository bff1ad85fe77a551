#pragma once

// Pseudo-Riemannian tensor calculus over chart-based fields: Levi-Civita
// connection, curvature, covariant derivatives, Nijenhuis tensors. Metric
// inversion is numeric per sample point; derivatives of the metric are
// symbolic.

#include <array>
#include <functional>
#include <stdexcept>
#include <vector>

#include "phgeom/forms.hpp"
#include "phgeom/linalg.hpp"
#include "phgeom/sampling.hpp"

namespace phgeom {

struct MetricField {
  std::array<std::array<Expression, 4>, 4> g;  // symmetric by construction
  ChartPtr chart;

  static MetricField from_upper_triangle(
      const ChartPtr& chart, const std::array<std::array<Expression, 4>, 4>& entries) {
    MetricField m;
    m.chart = chart;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) m.g[i][j] = entries[i <= j ? i : j][i <= j ? j : i];
    return m;
  }

  Mat4 operator()(const double pt[4], const ParamMap& params = {}) const {
    Mat4 v;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) v[i][j] = evaluate(g[i][j], pt, params);
    return v;
  }
};

struct EndomorphismField {
  std::array<std::array<Expression, 4>, 4> a;  // action on vector components
  ChartPtr chart;

  Mat4 operator()(const double pt[4], const ParamMap& params = {}) const {
    Mat4 v;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) v[i][j] = evaluate(a[i][j], pt, params);
    return v;
  }

  static EndomorphismField constant(const ChartPtr& chart, const Mat4& m) {
    EndomorphismField e;
    e.chart = chart;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) e.a[i][j] = make_const(m[i][j]);
    return e;
  }

  VectorField apply(const VectorField& x) const {
    VectorField r{{}, chart};
    for (int i = 0; i < 4; ++i) {
      std::vector<Expression> terms;
      for (int j = 0; j < 4; ++j) terms.push_back(make_mul({a[i][j], x.comp[j]}));
      r.comp[i] = make_add(std::move(terms));
    }
    return r;
  }
};

inline EndomorphismField compose(const EndomorphismField& a, const EndomorphismField& b) {
  EndomorphismField r;
  r.chart = a.chart;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      std::vector<Expression> terms;
      for (int k = 0; k < 4; ++k) terms.push_back(make_mul({a.a[i][k], b.a[k][j]}));
      r.a[i][j] = make_add(std::move(terms));
    }
  return r;
}

inline EndomorphismField endo_add(const EndomorphismField& a, const EndomorphismField& b,
                                  cplx sb = cplx(1.0, 0.0)) {
  EndomorphismField r;
  r.chart = a.chart;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      r.a[i][j] = make_add({a.a[i][j], make_mul({make_const(sb), b.a[i][j]})});
  return r;
}

inline EndomorphismField endo_scale(const EndomorphismField& a, cplx s) {
  EndomorphismField r;
  r.chart = a.chart;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r.a[i][j] = make_mul({make_const(s), a.a[i][j]});
  return r;
}

// ---------------------------------------------------------------------------
// Levi-Civita connection. Christoffel symbols are assembled per point from
// the symbolic first (and for curvature, second) derivatives of g and a
// numeric LU inversion of g at the point.

struct Connection {
  MetricField metric;
  std::array<std::array<std::array<Expression, 4>, 4>, 4> dg;    // dg[l][i][j] = d_l g_ij
  std::array<std::array<std::array<std::array<Expression, 4>, 4>, 4>, 4> d2g;  // d2g[m][l][i][j]

  using Gamma = std::array<std::array<std::array<double, 4>, 4>, 4>;  // [k][i][j]

  Mat4 metric_at(const double pt[4], const ParamMap& params) const {
    return metric(pt, params);
  }

  // Gamma^k_{ij}; lower = Gamma_{l,ij} available on request.
  Gamma christoffel_at(const double pt[4], const ParamMap& params = {}) const {
    Mat4 G = metric(pt, params);
    LU4 f = lu_factor(G);
    if (f.singular) throw std::runtime_error("degenerate metric at sample point");
    Mat4 Ginv = mat_inverse(G);
    double dgv[4][4][4];
    for (int l = 0; l < 4; ++l)
      for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
          double v = evaluate(dg[l][i][j], pt, params).real();
          dgv[l][i][j] = v;
          dgv[l][j][i] = v;
        }
    Gamma out{};
    for (int k = 0; k < 4; ++k)
      for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
          double s = 0.0;
          for (int l = 0; l < 4; ++l)
            s += Ginv[k][l].real() * (dgv[i][l][j] + dgv[j][l][i] - dgv[l][i][j]);
          out[k][i][j] = 0.5 * s;
          out[k][j][i] = out[k][i][j];
        }
    return out;
  }

  // d_m Gamma^k_{ij} from symbolic second derivatives and d(g^{-1}) = -g^{-1} dg g^{-1}.
  Gamma christoffel_derivative_at(const double pt[4], int m, const ParamMap& params = {}) const {
    Mat4 G = metric(pt, params);
    Mat4 Ginv = mat_inverse(G);
    double dgv[4][4][4];
    double d2gv[4][4][4];
    for (int l = 0; l < 4; ++l)
      for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
          dgv[l][i][j] = evaluate(dg[l][i][j], pt, params).real();
          dgv[l][j][i] = dgv[l][i][j];
          d2gv[l][i][j] = evaluate(d2g[m][l][i][j], pt, params).real();
          d2gv[l][j][i] = d2gv[l][i][j];
        }
    // dGinv = -Ginv * dG(m) * Ginv
    Mat4 dG{};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) dG[i][j] = evaluate(dg[m][i][j], pt, params).real();
    Mat4 dGinv = mat_scale(mat_mul(Ginv, mat_mul(dG, Ginv)), cplx(-1.0, 0.0));
    Gamma out{};
    for (int k = 0; k < 4; ++k)
      for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
          double s = 0.0;
          for (int l = 0; l < 4; ++l) {
            s += dGinv[k][l].real() * (dgv[i][l][j] + dgv[j][l][i] - dgv[l][i][j]);
            s += Ginv[k][l].real() * (d2gv[i][l][j] + d2gv[j][l][i] - d2gv[l][i][j]);
          }
          out[k][i][j] = 0.5 * s;
          out[k][j][i] = out[k][i][j];
        }
    return out;
  }
};

inline Connection christoffel(const MetricField& g) {
  Connection c;
  c.metric = g;
  for (int l = 0; l < 4; ++l)
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) {
        c.dg[l][i][j] = differentiate(g.g[i][j], l);
        c.dg[l][j][i] = c.dg[l][i][j];
        for (int m = 0; m < 4; ++m) {
          c.d2g[m][l][i][j] = differentiate(c.dg[l][i][j], m);
          c.d2g[m][l][j][i] = c.d2g[m][l][i][j];
        }
      }
  return c;
}

// ---------------------------------------------------------------------------
// curvature

struct CurvatureValue {
  // R^k_{l i j} (up), R_{klij} (down), Ricci_{lj}
  double up[4][4][4][4];
  double down[4][4][4][4];
  double ricci[4][4];
};

inline CurvatureValue curvature_at(const Connection& c, const double pt[4],
                                   const ParamMap& params = {}) {
  auto Gm = c.christoffel_at(pt, params);
  Connection::Gamma dGm[4];
  for (int m = 0; m < 4; ++m) dGm[m] = c.christoffel_derivative_at(pt, m, params);
  CurvatureValue r{};
  for (int k = 0; k < 4; ++k)
    for (int l = 0; l < 4; ++l)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          double v = dGm[i][k][j][l] - dGm[j][k][i][l];
          for (int s = 0; s < 4; ++s) v += Gm[k][i][s] * Gm[s][j][l] - Gm[k][j][s] * Gm[s][i][l];
          r.up[k][l][i][j] = v;
        }
  Mat4 G = c.metric(pt, params);
  for (int k = 0; k < 4; ++k)
    for (int l = 0; l < 4; ++l)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          double v = 0.0;
          for (int s = 0; s < 4; ++s) v += G[k][s].real() * r.up[s][l][i][j];
          r.down[k][l][i][j] = v;
        }
  for (int l = 0; l < 4; ++l)
    for (int j = 0; j < 4; ++j) {
      double v = 0.0;
      for (int s = 0; s < 4; ++s) v += r.up[s][l][s][j];
      r.ricci[l][j] = v;
    }
  return r;
}

// ---------------------------------------------------------------------------
// covariant derivatives (pointwise evaluators)

// (nabla_i X)^k = d_i X^k + Gamma^k_{i l} X^l
inline Mat4 covariant_derivative_vector_at(const Connection& c, const VectorField& x,
                                           const double pt[4], const ParamMap& params = {}) {
  auto Gm = c.christoffel_at(pt, params);
  Mat4 r{};  // r[i][k] = (nabla_i X)^k
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) {
      cplx v = evaluate(differentiate(x.comp[k], i), pt, params);
      for (int l = 0; l < 4; ++l) v += Gm[k][i][l] * evaluate(x.comp[l], pt, params);
      r[i][k] = v;
    }
  return r;
}

// (nabla_i A)^k_j = d_i A^k_j + Gamma^k_{il} A^l_j - Gamma^l_{ij} A^k_l
// A given either symbolically or as a pointwise functor (FD derivatives).
using PointEndo = std::function<Mat4(const std::array<double, 4>&)>;

inline std::array<Mat4, 4> covariant_derivative_endo_at(const Connection& c, const PointEndo& A,
                                                        const std::array<double, 4>& pt,
                                                        double h = 1e-3,
                                                        const ParamMap& params = {}) {
  auto Gm = c.christoffel_at(pt.data(), params);
  Mat4 a = A(pt);
  std::array<Mat4, 4> da;
  for (int i = 0; i < 4; ++i) {
    auto f = [&](const std::array<double, 4>& q) { return A(q); };
    // five-point stencil per entry
    auto at = [&](double d) {
      auto q = pt;
      q[i] += d;
      return f(q);
    };
    Mat4 p2 = at(2 * h), p1 = at(h), m1 = at(-h), m2 = at(-2 * h);
    for (int r = 0; r < 4; ++r)
      for (int s = 0; s < 4; ++s)
        da[i][r][s] = (-p2[r][s] + 8.0 * p1[r][s] - 8.0 * m1[r][s] + m2[r][s]) / (12.0 * h);
  }
  std::array<Mat4, 4> out;
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k)
      for (int j = 0; j < 4; ++j) {
        cplx v = da[i][k][j];
        for (int l = 0; l < 4; ++l)
          v += Gm[k][i][l] * a[l][j] - Gm[l][i][j] * a[k][l];
        out[i][k][j] = v;
      }
  return out;
}

inline PointEndo symbolic_endo(const EndomorphismField& a, ParamMap params = {}) {
  return [a, params](const std::array<double, 4>& p) { return a(p.data(), params); };
}

// nabla g (all components); vanishes for the Levi-Civita connection.
inline double metric_compatibility_residual(const Connection& c, const double pt[4],
                                            const ParamMap& params = {}) {
  auto Gm = c.christoffel_at(pt, params);
  Mat4 G = c.metric(pt, params);
  double worst = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = j; k < 4; ++k) {
        double v = evaluate(c.dg[i][j][k], pt, params).real();
        for (int l = 0; l < 4; ++l)
          v -= Gm[l][i][j] * G[l][k].real() + Gm[l][i][k] * G[j][l].real();
        worst = std::max(worst, std::abs(v));
      }
  return worst;
}

// ---------------------------------------------------------------------------
// Nijenhuis tensor N_A(X,Y) = A^2 [AX,AY] + [X,Y] - A[AX,Y] - A[X,AY].

struct NijenhuisEvaluator {
  PointEndo A;
  std::function<Mat4(const std::array<double, 4>&, int)> dA;  // exact d_l A when available
  double h = 8e-4;    // FD step for dA otherwise

  Mat4 deriv(const std::array<double, 4>& pt, int l) const {
    if (dA) return dA(pt, l);
    auto at = [&](double d) {
      auto q = pt;
      q[l] += d;
      return A(q);
    };
    Mat4 p2 = at(2 * h), p1 = at(h), m1 = at(-h), m2 = at(-2 * h);
    Mat4 r;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        r[a][b] = (-p2[a][b] + 8.0 * p1[a][b] - 8.0 * m1[a][b] + m2[a][b]) / (12.0 * h);
    return r;
  }

  // N on the coordinate pair (i,j) at pt; components returned as Vec4.
  Vec4 coordinate_pair(const std::array<double, 4>& pt, int i, int j) const {
    Mat4 a = A(pt);
    std::array<Mat4, 4> da;
    for (int l = 0; l < 4; ++l) da[l] = deriv(pt, l);
    Mat4 a2 = mat_mul(a, a);
    Vec4 n{};
    for (int k = 0; k < 4; ++k) {
      // [Ae_i, Ae_j]^m = A^l_i d_l A^m_j - A^l_j d_l A^m_i
      cplx v{0.0, 0.0};
      for (int m = 0; m < 4; ++m) {
        cplx br{0.0, 0.0};
        for (int l = 0; l < 4; ++l) br += a[l][i] * da[l][m][j] - a[l][j] * da[l][m][i];
        v += a2[k][m] * br;
      }
      // - A[Ae_i, e_j] - A[e_i, Ae_j];  [Ae_i, e_j]^m = -d_j A^m_i, [e_i, Ae_j]^m = d_i A^m_j
      for (int m = 0; m < 4; ++m) v += a[k][m] * (da[j][m][i] - da[i][m][j]);
      n[k] = v;
    }
    return n;
  }

  double max_residual(const std::vector<std::array<double, 4>>& pts) const {
    double worst = 0.0;
    for (auto& p : pts)
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
          Vec4 n = coordinate_pair(p, i, j);
          for (auto& v : n) worst = std::max(worst, std::abs(v));
        }
    return worst;
  }
};

// Exact-derivative variant for expression-backed endomorphism fields.
inline NijenhuisEvaluator nijenhuis(const EndomorphismField& a, ParamMap params = {}) {
  struct Sym {
    EndomorphismField a;
    std::array<std::array<std::array<Expression, 4>, 4>, 4> da;  // da[l][r][s]
    ParamMap params;
  };
  auto s = std::make_shared<Sym>();
  s->a = a;
  s->params = std::move(params);
  for (int l = 0; l < 4; ++l)
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) s->da[l][r][c] = differentiate(a.a[r][c], l);
  NijenhuisEvaluator ev;
  ev.A = [s](const std::array<double, 4>& p) { return s->a(p.data(), s->params); };
  ev.dA = [s](const std::array<double, 4>& p, int l) {
    Mat4 m;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) m[r][c] = evaluate(s->da[l][r][c], p.data(), s->params);
    return m;
  };
  return ev;
}

// Symbolic Nijenhuis on general vector fields (for tensoriality property tests).
inline VectorField nijenhuis_apply(const EndomorphismField& a, const VectorField& x,
                                   const VectorField& y) {
  VectorField ax = a.apply(x), ay = a.apply(y);
  VectorField t1 = lie_bracket(ax, ay);
  EndomorphismField a2 = compose(a, a);
  VectorField r{{}, x.chart};
  VectorField t2 = lie_bracket(x, y);
  VectorField t3 = a.apply(lie_bracket(ax, y));
  VectorField t4 = a.apply(lie_bracket(x, ay));
  VectorField a2t1 = a2.apply(t1);
  for (int k = 0; k < 4; ++k)
    r.comp[k] = make_add({a2t1.comp[k], t2.comp[k], make_neg(t3.comp[k]), make_neg(t4.comp[k])});
  return r;
}

inline NijenhuisEvaluator nijenhuis(PointEndo a, double h = 8e-4) {
  NijenhuisEvaluator ev;
  ev.A = std::move(a);
  ev.h = h;
  return ev;
}

// ---------------------------------------------------------------------------
// parallel / null reports

struct ParallelNullReport {
  double max_nabla = 0.0;       // max |(nabla X)| over samples
  double max_norm = 0.0;        // max |g(X,X)|
  double min_independence = 0;  // smallest pairwise Gram determinant (pairs only)
  bool pair = false;
};

inline ParallelNullReport is_parallel_null(const MetricField& g, const VectorField& x,
                                           const std::vector<std::array<double, 4>>& pts,
                                           const VectorField* y = nullptr,
                                           const ParamMap& params = {}) {
  Connection c = christoffel(g);
  ParallelNullReport rep;
  rep.pair = (y != nullptr);
  rep.min_independence = rep.pair ? 1e300 : 0.0;
  for (auto& p : pts) {
    Mat4 nab = covariant_derivative_vector_at(c, x, p.data(), params);
    rep.max_nabla = std::max(rep.max_nabla, mat_max_abs(nab));
    if (y) {
      Mat4 nab2 = covariant_derivative_vector_at(c, *y, p.data(), params);
      rep.max_nabla = std::max(rep.max_nabla, mat_max_abs(nab2));
    }
    Mat4 G = g(p.data(), params);
    Vec4 xv = evaluate(x, p.data(), params);
    cplx xx{0.0, 0.0};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) xx += G[i][j] * xv[i] * xv[j];
    rep.max_norm = std::max(rep.max_norm, std::abs(xx));
    if (y) {
      Vec4 yv = evaluate(*y, p.data(), params);
      cplx yy{0.0, 0.0};
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) yy += G[i][j] * yv[i] * yv[j];
      rep.max_norm = std::max(rep.max_norm, std::abs(yy));
      // Euclidean Gram determinant as the pointwise independence margin
      double g00 = 0, g01 = 0, g11 = 0;
      for (int i = 0; i < 4; ++i) {
        g00 += std::norm(xv[i]);
        g11 += std::norm(yv[i]);
        g01 += (std::conj(xv[i]) * yv[i]).real();
      }
      rep.min_independence = std::min(rep.min_independence, g00 * g11 - g01 * g01);
    }
  }
  return rep;
}

}  // namespace phgeom
