#pragma once

// Shared helpers for the unit and acceptance suites: standard charts, seeded
// random expressions/forms/vector fields, and residual utilities. Framework
// free so the acceptance binary can use it without Catch2.

#include <array>
#include <cstdint>
#include <vector>

#include "phgeom/expr.hpp"
#include "phgeom/forms.hpp"
#include "phgeom/sampling.hpp"

namespace phtest {

using namespace phgeom;

inline ChartPtr chart_xyuv() {
  return make_chart({"x", "y", "u", "v"}, {{"z", 0, 1}, {"w", 2, 3}});
}

inline ChartPtr chart_upper_half() {
  return make_chart({"x", "y", "u", "v"}, {{"z", 0, 1}, {"w", 2, 3}}, make_coord(3, "v"));
}

inline ChartPtr chart_c2() {
  return make_chart({"x1", "y1", "x2", "y2"}, {{"z1", 0, 1}, {"z2", 2, 3}});
}

// Bounded random expression: trig/polynomial with tame constants, safe
// denominators and logs. Suitable for residual tests at 1e-9 tolerances.
inline Expression random_bounded_expression(std::uint64_t seed, std::uint64_t& ctr, int depth) {
  auto u = [&] { return uniform_at(seed, ctr++); };
  if (depth <= 0) {
    if (u() < 0.55) {
      int idx = static_cast<int>(u() * 4) % 4;
      static const char* names[4] = {"x", "y", "u", "v"};
      return make_coord(idx, names[idx]);
    }
    return make_const(u() * 4.0 - 2.0);
  }
  double r = u();
  auto sub = [&] { return random_bounded_expression(seed, ctr, depth - 1); };
  if (r < 0.22) return make_add({sub(), sub()});
  if (r < 0.40) return make_mul({sub(), sub()});
  if (r < 0.50) return make_sub(sub(), sub());
  if (r < 0.66) return make_unary(Op::Sin, sub());
  if (r < 0.82) return make_unary(Op::Cos, sub());
  if (r < 0.90) return make_pow(make_add({make_unary(Op::Cos, sub()), make_const(2.5)}), 2.0);
  return make_mul({make_const(cplx(0.0, 1.0)), sub()});
}

inline DifferentialForm random_form(const ChartPtr& chart, int degree, std::uint64_t seed,
                                    std::uint64_t& ctr, int depth = 2) {
  DifferentialForm f = DifferentialForm::zero(degree, chart);
  for (int m = 0; m < 16; ++m) {
    if (mask_degree(static_cast<Mask>(m)) != degree) continue;
    f.set(static_cast<Mask>(m), random_bounded_expression(seed, ctr, depth));
  }
  return f;
}

inline VectorField random_vector_field(const ChartPtr& chart, std::uint64_t seed,
                                       std::uint64_t& ctr, int depth = 2) {
  VectorField v{{}, chart};
  for (int i = 0; i < 4; ++i) v.comp[i] = random_bounded_expression(seed, ctr, depth);
  return v;
}

// A fixed nonlinear diffeomorphism-like map of the xyuv chart onto itself,
// used by the pullback naturality tests.
inline SmoothMap curved_test_map(const ChartPtr& chart) {
  SmoothMap m;
  m.source = chart;
  m.target = chart;
  m.name = "curved";
  Expression x = make_coord(0, "x"), y = make_coord(1, "y");
  Expression u = make_coord(2, "u"), v = make_coord(3, "v");
  m.comp[0] = make_add({x, make_mul({make_const(0.3), make_unary(Op::Sin, y)})});
  m.comp[1] = make_add({y, make_mul({make_const(0.2), make_unary(Op::Cos, u)})});
  m.comp[2] = make_add({u, make_mul({make_const(0.25), make_unary(Op::Sin, make_add({x, v}))})});
  m.comp[3] = make_add({v, make_mul({make_const(0.15), make_unary(Op::Cos, x)})});
  return m;
}

inline double max_form_residual(const DifferentialForm& f,
                                const std::vector<std::array<double, 4>>& pts,
                                const ParamMap& params = {}) {
  double worst = 0.0;
  for (auto& p : pts) worst = std::max(worst, evaluate(f, p.data(), params).max_abs());
  return worst;
}

inline std::vector<std::array<double, 4>> box_points(std::uint64_t seed, int n,
                                                     std::array<double, 4> lo = {-1, -1, -1, -1},
                                                     std::array<double, 4> hi = {1, 1, 1, 1}) {
  return draw_samples(box_sampler(lo, hi), seed, n);
}

}  // namespace phtest
