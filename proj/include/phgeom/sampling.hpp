#pragma once

// Deterministic counter-based sampling. The generator is fixed so that
// alternate-language ports reproduce identical points:
//
//   out(seed, n) = mix(seed + (n + 1) * 0x9E3779B97F4A7C15)  (splitmix64)
//   uniform(seed, n) = (out >> 11) * 2^-53  in [0, 1)
//
// Sample index k draws from the 8-wide counter block n = 8k .. 8k+7; each
// family maps those uniforms into its sampling domain.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace phgeom {

using cplx_fd = std::complex<double>;

inline std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline double uniform_at(std::uint64_t seed, std::uint64_t counter) {
  return static_cast<double>(splitmix64_at(seed, counter) >> 11) * 0x1.0p-53;
}

struct SampleStream {
  std::uint64_t seed;
  std::uint64_t index;
  double u(int slot) const { return uniform_at(seed, index * 8 + static_cast<std::uint64_t>(slot)); }
  // uniform in [lo, hi)
  double in(int slot, double lo, double hi) const { return lo + (hi - lo) * u(slot); }
};

using PointSampler = std::function<std::array<double, 4>(SampleStream)>;

inline PointSampler box_sampler(std::array<double, 4> lo, std::array<double, 4> hi) {
  return [lo, hi](SampleStream s) {
    std::array<double, 4> p;
    for (int j = 0; j < 4; ++j) p[j] = s.in(j, lo[j], hi[j]);
    return p;
  };
}

inline std::vector<std::array<double, 4>> draw_samples(const PointSampler& sampler,
                                                       std::uint64_t seed, int count) {
  std::vector<std::array<double, 4>> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    pts.push_back(sampler(SampleStream{seed, static_cast<std::uint64_t>(i)}));
  return pts;
}

// Five-point central difference of a scalar function along one coordinate;
// O(h^4) truncation error.
template <class F>
double fd_derivative(F&& f, std::array<double, 4> pt, int coord, double h) {
  auto at = [&](double d) {
    auto q = pt;
    q[coord] += d;
    return f(q);
  };
  return (-at(2 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2 * h)) / (12.0 * h);
}

template <class F>
cplx_fd fd_derivative_c(F&& f, std::array<double, 4> pt, int coord, double h) {
  auto at = [&](double d) {
    auto q = pt;
    q[coord] += d;
    return f(q);
  };
  return (-at(2 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2 * h)) / (12.0 * h);
}

}  // namespace phgeom
