#pragma once

// Exterior algebra of differential forms on a 4-coordinate chart.
// Coefficients are expression trees indexed by strictly increasing index
// tuples, encoded as bitmasks (bit i set = coordinate i present). An absent
// mask means a zero coefficient.

#include <bit>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "phgeom/expr.hpp"
#include "phgeom/linalg.hpp"

namespace phgeom {

using Mask = std::uint8_t;

inline int mask_degree(Mask m) { return std::popcount(static_cast<unsigned>(m)); }

// Sign of dx_A ^ dx_B for disjoint increasing tuples A, B: (-1)^{inversions}.
inline int merge_sign(Mask a, Mask b) {
  int inv = 0;
  for (int i = 0; i < 4; ++i) {
    if (!(b & (1u << i))) continue;
    for (int j = i + 1; j < 4; ++j)
      if (a & (1u << j)) ++inv;
  }
  return (inv % 2 == 0) ? 1 : -1;
}

struct DifferentialForm {
  int degree = 0;
  std::map<Mask, Expression> coeffs;
  ChartPtr chart;

  static DifferentialForm zero(int deg, ChartPtr chart) {
    return DifferentialForm{deg, {}, std::move(chart)};
  }

  DifferentialForm& set(Mask m, Expression e) {
    if (mask_degree(m) != degree) throw std::invalid_argument("mask degree mismatch");
    if (!detail::is_zero(e)) coeffs[m] = std::move(e);
    return *this;
  }

  Expression coeff(Mask m) const {
    auto it = coeffs.find(m);
    return it == coeffs.end() ? make_const(0.0) : it->second;
  }
};

struct VectorField {
  std::array<Expression, 4> comp;
  ChartPtr chart;

  static VectorField basis(int i, ChartPtr chart) {
    VectorField v{{make_const(0.0), make_const(0.0), make_const(0.0), make_const(0.0)},
                  std::move(chart)};
    v.comp[i] = make_const(1.0);
    return v;
  }
};

// Target coordinates as expressions in the source coordinates.
struct SmoothMap {
  ChartPtr source;
  ChartPtr target;
  std::array<Expression, 4> comp;
  std::string name;

  std::array<double, 4> operator()(const std::array<double, 4>& p,
                                   const ParamMap& params = {}) const {
    std::array<double, 4> q;
    for (int i = 0; i < 4; ++i) {
      cplx v = evaluate(comp[i], p.data(), params);
      q[i] = v.real();
    }
    return q;
  }
};

// ---------------------------------------------------------------------------
// algebra

inline DifferentialForm add(const DifferentialForm& a, const DifferentialForm& b) {
  if (a.degree != b.degree) throw std::invalid_argument("form degree mismatch in sum");
  DifferentialForm r = a;
  for (auto& [m, e] : b.coeffs) {
    auto it = r.coeffs.find(m);
    if (it == r.coeffs.end()) r.coeffs[m] = e;
    else {
      it->second = make_add({it->second, e});
      if (detail::is_zero(it->second)) r.coeffs.erase(it);
    }
  }
  return r;
}

inline DifferentialForm scale(const DifferentialForm& a, const Expression& s) {
  DifferentialForm r = DifferentialForm::zero(a.degree, a.chart);
  for (auto& [m, e] : a.coeffs) r.set(m, make_mul({s, e}));
  return r;
}

inline DifferentialForm scale(const DifferentialForm& a, cplx s) {
  return scale(a, make_const(s));
}

inline DifferentialForm sub(const DifferentialForm& a, const DifferentialForm& b) {
  return add(a, scale(b, cplx(-1.0, 0.0)));
}

inline DifferentialForm conj(const DifferentialForm& a) {
  DifferentialForm r = DifferentialForm::zero(a.degree, a.chart);
  for (auto& [m, e] : a.coeffs) r.set(m, make_unary(Op::Conj, e));
  return r;
}

inline DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b) {
  if (a.chart != b.chart) throw std::invalid_argument("wedge across different charts");
  if (a.degree + b.degree > 4)
    throw std::invalid_argument("wedge degree overflow: " + std::to_string(a.degree) + "+" +
                                std::to_string(b.degree));
  DifferentialForm r = DifferentialForm::zero(a.degree + b.degree, a.chart);
  for (auto& [ma, ea] : a.coeffs)
    for (auto& [mb, eb] : b.coeffs) {
      if (ma & mb) continue;
      Mask m = ma | mb;
      int s = merge_sign(ma, mb);
      Expression term = make_mul({make_const(static_cast<double>(s)), ea, eb});
      auto it = r.coeffs.find(m);
      if (it == r.coeffs.end()) r.coeffs[m] = term;
      else it->second = make_add({it->second, term});
    }
  for (auto it = r.coeffs.begin(); it != r.coeffs.end();)
    it = detail::is_zero(it->second) ? r.coeffs.erase(it) : std::next(it);
  return r;
}

inline DifferentialForm exterior_derivative(const DifferentialForm& a) {
  if (a.degree > 3) throw std::invalid_argument("exterior derivative of a 4-form");
  DifferentialForm r = DifferentialForm::zero(a.degree + 1, a.chart);
  for (auto& [m, e] : a.coeffs) {
    for (int i = 0; i < 4; ++i) {
      if (m & (1u << i)) continue;
      Expression de = differentiate(e, i);
      if (detail::is_zero(de)) continue;
      int s = merge_sign(static_cast<Mask>(1u << i), m);
      Mask nm = static_cast<Mask>(m | (1u << i));
      Expression term = make_mul({make_const(static_cast<double>(s)), de});
      auto it = r.coeffs.find(nm);
      if (it == r.coeffs.end()) r.coeffs[nm] = term;
      else it->second = make_add({it->second, term});
    }
  }
  for (auto it = r.coeffs.begin(); it != r.coeffs.end();)
    it = detail::is_zero(it->second) ? r.coeffs.erase(it) : std::next(it);
  return r;
}

inline DifferentialForm interior_product(const VectorField& x, const DifferentialForm& a) {
  if (a.degree < 1) return DifferentialForm::zero(0, a.chart);
  DifferentialForm r = DifferentialForm::zero(a.degree - 1, a.chart);
  for (auto& [m, e] : a.coeffs) {
    int pos = 0;
    for (int i = 0; i < 4; ++i) {
      if (!(m & (1u << i))) continue;
      if (!detail::is_zero(x.comp[i])) {
        int s = (pos % 2 == 0) ? 1 : -1;
        Mask nm = static_cast<Mask>(m & ~(1u << i));
        Expression term = make_mul({make_const(static_cast<double>(s)), x.comp[i], e});
        auto it = r.coeffs.find(nm);
        if (it == r.coeffs.end()) r.coeffs[nm] = term;
        else it->second = make_add({it->second, term});
      }
      ++pos;
    }
  }
  for (auto it = r.coeffs.begin(); it != r.coeffs.end();)
    it = detail::is_zero(it->second) ? r.coeffs.erase(it) : std::next(it);
  return r;
}

// Pullback along a smooth map: coefficients composed with the map, basis
// one-forms replaced by the differentials of the component functions.
inline DifferentialForm pullback(const SmoothMap& m, const DifferentialForm& a) {
  if (a.chart != m.target) throw std::invalid_argument("pullback: form lives on the wrong chart");
  std::array<Expression, 4> repl;
  for (int i = 0; i < 4; ++i) repl[i] = m.comp[i];
  // differentials of the components as 1-forms on the source chart
  std::array<DifferentialForm, 4> dcomp;
  for (int i = 0; i < 4; ++i) {
    dcomp[i] = DifferentialForm::zero(1, m.source);
    for (int j = 0; j < 4; ++j) {
      Expression d = differentiate(m.comp[i], j);
      if (!detail::is_zero(d)) dcomp[i].set(static_cast<Mask>(1u << j), d);
    }
  }
  DifferentialForm r = DifferentialForm::zero(a.degree, m.source);
  for (auto& [mask, e] : a.coeffs) {
    DifferentialForm term = DifferentialForm::zero(0, m.source);
    term.set(0, substitute(e, repl));
    for (int i = 0; i < 4; ++i)
      if (mask & (1u << i)) term = wedge(term, dcomp[i]);
    r = add(r, term);
  }
  return r;
}

inline VectorField lie_bracket(const VectorField& x, const VectorField& y) {
  if (x.chart != y.chart) throw std::invalid_argument("bracket across different charts");
  VectorField r{{}, x.chart};
  for (int k = 0; k < 4; ++k) {
    std::vector<Expression> terms;
    for (int l = 0; l < 4; ++l) {
      terms.push_back(make_mul({x.comp[l], differentiate(y.comp[k], l)}));
      terms.push_back(make_neg(make_mul({y.comp[l], differentiate(x.comp[k], l)})));
    }
    r.comp[k] = make_add(std::move(terms));
  }
  return r;
}

// Cartan's formula.
inline DifferentialForm lie_derivative(const VectorField& x, const DifferentialForm& a) {
  DifferentialForm d_ix = a.degree >= 1
                              ? exterior_derivative(interior_product(x, a))
                              : DifferentialForm::zero(a.degree, a.chart);
  if (a.degree == 4) return d_ix;  // d a = 0 in top degree
  DifferentialForm ix_d = interior_product(x, exterior_derivative(a));
  return add(d_ix, ix_d);
}

// ---------------------------------------------------------------------------
// pointwise values

struct FormValue {
  int degree = 0;
  std::array<cplx, 16> c{};  // indexed by mask

  double max_abs() const {
    double m = 0.0;
    for (auto& v : c) m = std::max(m, std::abs(v));
    return m;
  }
};

inline FormValue evaluate(const DifferentialForm& a, const double pt[4],
                          const ParamMap& params = {}) {
  FormValue v;
  v.degree = a.degree;
  for (auto& [m, e] : a.coeffs) v.c[m] = evaluate(e, pt, params);
  return v;
}

inline FormValue fv_sub(const FormValue& a, const FormValue& b) {
  FormValue r;
  r.degree = a.degree;
  for (int m = 0; m < 16; ++m) r.c[m] = a.c[m] - b.c[m];
  return r;
}

inline Vec4 evaluate(const VectorField& x, const double pt[4], const ParamMap& params = {}) {
  Vec4 v;
  for (int i = 0; i < 4; ++i) v[i] = evaluate(x.comp[i], pt, params);
  return v;
}

// d(z) and related helpers for charts with complex pairings.
inline DifferentialForm complex_coordinate_differential(const ChartPtr& chart,
                                                        const std::string& zname,
                                                        bool conjugated = false) {
  const ComplexPairing* p = chart->pairing(zname);
  if (!p) throw std::invalid_argument("no complex pairing named '" + zname + "'");
  DifferentialForm f = DifferentialForm::zero(1, chart);
  f.set(static_cast<Mask>(1u << p->re), make_const(1.0));
  f.set(static_cast<Mask>(1u << p->im), make_const(conjugated ? cplx(0.0, -1.0) : cplx(0.0, 1.0)));
  return f;
}

inline ScalarField complex_coordinate(const ChartPtr& chart, const std::string& zname,
                                      bool conjugated = false) {
  const ComplexPairing* p = chart->pairing(zname);
  if (!p) throw std::invalid_argument("no complex pairing named '" + zname + "'");
  Expression re = make_coord(p->re, chart->coords[p->re]);
  Expression im = make_coord(p->im, chart->coords[p->im]);
  cplx unit = conjugated ? cplx(0.0, -1.0) : cplx(0.0, 1.0);
  return ScalarField{make_add({re, make_mul({make_const(unit), im})}), chart};
}

}  // namespace phgeom
