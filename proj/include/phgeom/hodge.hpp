#pragma once

// Split-signature Hodge star, codifferential and the d^c operator.
//
// Conventions (pinned by executable identities, see tests):
//   * orientation = chart coordinate order;
//   * star star = sign(det g) (-1)^{k(4-k)} on k-forms; a (2,2) metric has
//     det g > 0, so star is an involution on 2-forms;
//   * delta = -star d star on k-forms; this is the formal adjoint of d for
//     the flat split metric on a periodic box (integration-by-parts test);
//   * on 1-forms d^c beta = -J d (J beta) with (J beta)(X) = -beta(JX) and
//     (J gamma)(X,Y) = gamma(JX, JY) on 2-forms; on functions
//     d^c psi = -J d psi.
//
// The star is evaluated pointwise (numeric metric inverse); the
// codifferential differentiates the starred form by five-point finite
// differences.

#include <array>
#include <functional>
#include <vector>

#include "phgeom/forms.hpp"
#include "phgeom/geometry.hpp"
#include "phgeom/linalg.hpp"

namespace phgeom {

namespace detail {

// Levi-Civita symbol on 4 indices.
inline int eps4(int a, int b, int c, int d) {
  int idx[4] = {a, b, c, d};
  int sign = 1;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      if (idx[i] == idx[j]) return 0;
      if (idx[i] > idx[j]) sign = -sign;
    }
  return sign;
}

inline std::vector<int> mask_bits(Mask m) {
  std::vector<int> v;
  for (int i = 0; i < 4; ++i)
    if (m & (1u << i)) v.push_back(i);
  return v;
}

}  // namespace detail

// Pointwise Hodge star of a k-form value: needs the metric value at the point.
inline FormValue hodge_star_value(const FormValue& b, const Mat4& G) {
  const int k = b.degree;
  Mat4 Ginv = mat_inverse(G);
  double det = mat_det(G).real();
  if (std::abs(det) < 1e-12) throw std::runtime_error("degenerate metric in hodge star");
  double root = std::sqrt(std::abs(det));
  FormValue out;
  out.degree = 4 - k;

  // dense antisymmetric representation of b with raised indices
  // b^{i1..ik} = g^{i1 m1}...g^{ik mk} b_{m1..mk}
  auto dense = [&](const std::array<int, 4>& idx, int kk) -> cplx {
    // value of b_{idx[0..kk-1]} from the increasing-mask storage
    Mask m = 0;
    int perm[4];
    for (int i = 0; i < kk; ++i) {
      if (m & (1u << idx[i])) return cplx(0.0, 0.0);
      m |= (1u << idx[i]);
      perm[i] = idx[i];
    }
    // sign of sorting perm
    int sign = 1;
    for (int i = 0; i < kk; ++i)
      for (int j = i + 1; j < kk; ++j)
        if (perm[i] > perm[j]) sign = -sign;
    return static_cast<double>(sign) * b.c[m];
  };

  // iterate over increasing complement masks J
  for (int mj = 0; mj < 16; ++mj) {
    if (mask_degree(static_cast<Mask>(mj)) != 4 - k) continue;
    auto jbits = detail::mask_bits(static_cast<Mask>(mj));
    cplx acc{0.0, 0.0};
    // sum over all k-tuples (i1..ik) and raising indices (m1..mk)
    std::array<int, 4> iidx{};
    std::function<void(int)> loop_i = [&](int depth) {
      if (depth == k) {
        int e[4];
        for (int t = 0; t < k; ++t) e[t] = iidx[t];
        for (int t = 0; t < 4 - k; ++t) e[k + t] = jbits[t];
        int eps = detail::eps4(e[0], e[1], e[2], e[3]);
        if (eps == 0) return;
        // raised component b^{i1..ik}
        std::array<int, 4> midx{};
        cplx raised{0.0, 0.0};
        std::function<void(int, cplx)> loop_m = [&](int d2, cplx w) {
          if (d2 == k) {
            raised += w * dense(midx, k);
            return;
          }
          for (int m = 0; m < 4; ++m) {
            cplx gim = Ginv[iidx[d2]][m];
            if (gim == cplx(0.0, 0.0)) continue;
            midx[d2] = m;
            loop_m(d2 + 1, w * gim);
          }
        };
        loop_m(0, cplx(1.0, 0.0));
        acc += raised * static_cast<double>(eps);
      } else {
        for (int i = 0; i < 4; ++i) {
          iidx[depth] = i;
          loop_i(depth + 1);
        }
      }
    };
    if (k == 0) {
      int e[4] = {jbits[0], jbits[1], jbits[2], jbits[3]};
      acc = b.c[0] * static_cast<double>(detail::eps4(e[0], e[1], e[2], e[3]));
    } else {
      loop_i(0);
      double fact = 1.0;
      for (int t = 2; t <= k; ++t) fact *= t;
      acc /= fact;
    }
    out.c[mj] = acc * root;
  }
  return out;
}

// Star of a symbolic form at a point.
inline FormValue hodge_star_at(const DifferentialForm& b, const MetricField& g,
                               const std::array<double, 4>& pt, const ParamMap& params = {}) {
  return hodge_star_value(evaluate(b, pt.data(), params), g(pt.data(), params));
}

// Pointwise form field (for FD-based differential operators).
using PointForm = std::function<FormValue(const std::array<double, 4>&)>;

inline FormValue fd_exterior_derivative(const PointForm& f, const std::array<double, 4>& pt,
                                        int degree, double h = 1e-3) {
  FormValue out;
  out.degree = degree + 1;
  std::array<FormValue, 4> d;
  for (int i = 0; i < 4; ++i) {
    auto at = [&](double dd) {
      auto q = pt;
      q[i] += dd;
      return f(q);
    };
    FormValue p2 = at(2 * h), p1 = at(h), m1 = at(-h), m2 = at(-2 * h);
    d[i].degree = degree;
    for (int m = 0; m < 16; ++m)
      d[i].c[m] = (-p2.c[m] + 8.0 * p1.c[m] - 8.0 * m1.c[m] + m2.c[m]) / (12.0 * h);
  }
  for (int m = 0; m < 16; ++m) {
    if (mask_degree(static_cast<Mask>(m)) != degree) continue;
    for (int i = 0; i < 4; ++i) {
      if (m & (1 << i)) continue;
      int s = merge_sign(static_cast<Mask>(1u << i), static_cast<Mask>(m));
      out.c[m | (1 << i)] += static_cast<double>(s) * d[i].c[m];
    }
  }
  return out;
}

// Codifferential delta = -star d star (adjoint of d for split-signature
// metrics on 4-manifolds; pinned by the integration-by-parts test). Returns
// the (k-1)-form value at pt.
inline FormValue codifferential_at(const DifferentialForm& b, const MetricField& g,
                                   const std::array<double, 4>& pt, double h = 1e-3,
                                   const ParamMap& params = {}) {
  if (b.degree < 1) throw std::invalid_argument("codifferential needs degree >= 1");
  PointForm starb = [&](const std::array<double, 4>& q) { return hodge_star_at(b, g, q, params); };
  FormValue dstar = fd_exterior_derivative(starb, pt, 4 - b.degree, h);
  FormValue out = hodge_star_value(dstar, g(pt.data(), params));
  for (auto& c : out.c) c = -c;
  return out;
}

// ---------------------------------------------------------------------------
// J acting on forms, and d^c (symbolic; J an expression-backed field).

inline DifferentialForm j_act(const EndomorphismField& J, const DifferentialForm& a) {
  if (a.degree == 0) return a;
  DifferentialForm r = DifferentialForm::zero(a.degree, a.chart);
  if (a.degree == 1) {
    // (J alpha)_i = -J^k_i alpha_k
    for (int i = 0; i < 4; ++i) {
      std::vector<Expression> terms;
      for (int k = 0; k < 4; ++k) {
        Expression ak = a.coeff(static_cast<Mask>(1u << k));
        if (detail::is_zero(ak)) continue;
        terms.push_back(make_neg(make_mul({J.a[k][i], ak})));
      }
      if (!terms.empty()) r.set(static_cast<Mask>(1u << i), make_add(std::move(terms)));
    }
    return r;
  }
  if (a.degree == 2) {
    // (J gamma)(e_i, e_j) = gamma(J e_i, J e_j) = J^k_i J^l_j gamma_{kl}
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        std::vector<Expression> terms;
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l) {
            if (k == l) continue;
            Mask m = static_cast<Mask>((1u << k) | (1u << l));
            Expression gkl = a.coeff(m);
            if (detail::is_zero(gkl)) continue;
            if (k > l) gkl = make_neg(gkl);
            terms.push_back(make_mul({J.a[k][i], J.a[l][j], gkl}));
          }
        if (!terms.empty())
          r.set(static_cast<Mask>((1u << i) | (1u << j)), make_add(std::move(terms)));
      }
    return r;
  }
  throw std::invalid_argument("j_act supports degrees 0..2");
}

// d^c psi = -J d psi on functions; d^c beta = -J d (J beta) on 1-forms.
inline DifferentialForm dc_operator(const DifferentialForm& a, const EndomorphismField& J) {
  if (a.degree == 0) {
    DifferentialForm da = exterior_derivative(a);
    return scale(j_act(J, da), cplx(-1.0, 0.0));
  }
  if (a.degree == 1) {
    DifferentialForm jb = j_act(J, a);
    DifferentialForm djb = exterior_derivative(jb);
    return scale(j_act(J, djb), cplx(-1.0, 0.0));
  }
  throw std::invalid_argument("dc_operator is defined on 0- and 1-forms");
}

inline DifferentialForm ddc_operator(const DifferentialForm& a, const EndomorphismField& J) {
  return exterior_derivative(dc_operator(a, J));
}

// Pointwise pairing <a,b>_g = (1/k!) a_{I} b^{I} and the L2-box pairing used
// by the adjointness pinning test.
inline cplx form_inner_value(const FormValue& a, const FormValue& b, const Mat4& G) {
  const int k = a.degree;
  Mat4 Ginv = mat_inverse(G);
  auto dense = [&](const FormValue& f, const std::array<int, 4>& idx) -> cplx {
    Mask m = 0;
    int sign = 1;
    for (int i = 0; i < k; ++i) {
      if (m & (1u << idx[i])) return cplx(0.0, 0.0);
      m |= (1u << idx[i]);
    }
    int perm[4];
    for (int i = 0; i < k; ++i) perm[i] = idx[i];
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j)
        if (perm[i] > perm[j]) sign = -sign;
    return static_cast<double>(sign) * f.c[m];
  };
  if (k == 0) return a.c[0] * b.c[0];
  cplx acc{0.0, 0.0};
  std::array<int, 4> ii{}, jj{};
  std::function<void(int, cplx)> loop = [&](int depth, cplx w) {
    if (depth == k) {
      acc += w * dense(a, ii) * dense(b, jj);
      return;
    }
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        cplx gij = Ginv[i][j];
        if (gij == cplx(0.0, 0.0)) continue;
        ii[depth] = i;
        jj[depth] = j;
        loop(depth + 1, w * gij);
      }
  };
  loop(0, cplx(1.0, 0.0));
  double fact = 1.0;
  for (int t = 2; t <= k; ++t) fact *= t;
  return acc / fact;
}

}  // namespace phgeom
