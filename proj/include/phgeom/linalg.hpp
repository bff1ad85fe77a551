#pragma once

// Small dense complex linear algebra for 4x4 chart-sized problems:
// LU with partial pivoting, determinants, inverses, minimum-norm
// underdetermined solves. No external dependency; everything is 4x4 or
// smaller.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "phgeom/expr.hpp"

namespace phgeom {

using Vec4 = std::array<cplx, 4>;
using Mat4 = std::array<std::array<cplx, 4>, 4>;

inline Mat4 mat_zero() {
  Mat4 m{};
  return m;
}

inline Mat4 mat_identity() {
  Mat4 m{};
  for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
  return m;
}

inline Mat4 mat_mul(const Mat4& a, const Mat4& b) {
  Mat4 r{};
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) {
      cplx aik = a[i][k];
      if (aik == cplx(0.0, 0.0)) continue;
      for (int j = 0; j < 4; ++j) r[i][j] += aik * b[k][j];
    }
  return r;
}

inline Vec4 mat_vec(const Mat4& a, const Vec4& x) {
  Vec4 r{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r[i] += a[i][j] * x[j];
  return r;
}

inline Mat4 mat_add(const Mat4& a, const Mat4& b) {
  Mat4 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r[i][j] = a[i][j] + b[i][j];
  return r;
}

inline Mat4 mat_sub(const Mat4& a, const Mat4& b) {
  Mat4 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r[i][j] = a[i][j] - b[i][j];
  return r;
}

inline Mat4 mat_scale(const Mat4& a, cplx s) {
  Mat4 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r[i][j] = a[i][j] * s;
  return r;
}

inline Mat4 mat_transpose(const Mat4& a) {
  Mat4 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r[i][j] = a[j][i];
  return r;
}

inline double mat_max_abs(const Mat4& a) {
  double m = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m = std::max(m, std::abs(a[i][j]));
  return m;
}

inline cplx mat_trace(const Mat4& a) { return a[0][0] + a[1][1] + a[2][2] + a[3][3]; }

struct LU4 {
  Mat4 lu;
  std::array<int, 4> perm;
  int sign = 1;
  bool singular = false;
};

inline LU4 lu_factor(Mat4 a, double tol = 1e-13) {
  LU4 f;
  f.perm = {0, 1, 2, 3};
  double scale = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) scale = std::max(scale, std::abs(a[i][j]));
  if (scale == 0.0) scale = 1.0;
  for (int c = 0; c < 4; ++c) {
    int piv = c;
    double best = std::abs(a[c][c]);
    for (int r = c + 1; r < 4; ++r)
      if (std::abs(a[r][c]) > best) { best = std::abs(a[r][c]); piv = r; }
    if (best <= tol * scale) { f.singular = true; }
    if (piv != c) {
      std::swap(a[piv], a[c]);
      std::swap(f.perm[piv], f.perm[c]);
      f.sign = -f.sign;
    }
    if (a[c][c] == cplx(0.0, 0.0)) continue;
    for (int r = c + 1; r < 4; ++r) {
      cplx m = a[r][c] / a[c][c];
      a[r][c] = m;
      for (int j = c + 1; j < 4; ++j) a[r][j] -= m * a[c][j];
    }
  }
  f.lu = a;
  return f;
}

inline cplx lu_det(const LU4& f) {
  cplx d(static_cast<double>(f.sign), 0.0);
  for (int i = 0; i < 4; ++i) d *= f.lu[i][i];
  return d;
}

inline Vec4 lu_solve(const LU4& f, const Vec4& b) {
  if (f.singular) throw std::runtime_error("singular 4x4 system");
  Vec4 x;
  for (int i = 0; i < 4; ++i) x[i] = b[f.perm[i]];
  for (int i = 1; i < 4; ++i)
    for (int j = 0; j < i; ++j) x[i] -= f.lu[i][j] * x[j];
  for (int i = 3; i >= 0; --i) {
    for (int j = i + 1; j < 4; ++j) x[i] -= f.lu[i][j] * x[j];
    x[i] /= f.lu[i][i];
  }
  return x;
}

inline Mat4 mat_inverse(const Mat4& a) {
  LU4 f = lu_factor(a);
  if (f.singular) throw std::runtime_error("singular matrix");
  Mat4 inv;
  for (int c = 0; c < 4; ++c) {
    Vec4 e{};
    e[c] = 1.0;
    Vec4 x = lu_solve(f, e);
    for (int r = 0; r < 4; ++r) inv[r][c] = x[r];
  }
  return inv;
}

// X = A^{-1} B
inline Mat4 mat_solve(const Mat4& a, const Mat4& b) {
  LU4 f = lu_factor(a);
  if (f.singular) throw std::runtime_error("singular matrix");
  Mat4 x;
  for (int c = 0; c < 4; ++c) {
    Vec4 col;
    for (int r = 0; r < 4; ++r) col[r] = b[r][c];
    Vec4 s = lu_solve(f, col);
    for (int r = 0; r < 4; ++r) x[r][c] = s[r];
  }
  return x;
}

inline cplx mat_det(const Mat4& a) { return lu_det(lu_factor(a)); }

// Minimum-norm solution of the 2x4 underdetermined system M z = rhs,
// z = M^T (M M^T)^{-1} rhs  (real arithmetic).
inline std::array<double, 4> min_norm_solve_2x4(const std::array<std::array<double, 4>, 2>& m,
                                                const std::array<double, 2>& rhs) {
  double g00 = 0.0, g01 = 0.0, g11 = 0.0;
  for (int j = 0; j < 4; ++j) {
    g00 += m[0][j] * m[0][j];
    g01 += m[0][j] * m[1][j];
    g11 += m[1][j] * m[1][j];
  }
  double det = g00 * g11 - g01 * g01;
  if (std::abs(det) < 1e-14 * std::max(1.0, g00 * g11))
    throw std::runtime_error("degenerate completion system (fields not independent)");
  double y0 = (g11 * rhs[0] - g01 * rhs[1]) / det;
  double y1 = (-g01 * rhs[0] + g00 * rhs[1]) / det;
  std::array<double, 4> z{};
  for (int j = 0; j < 4; ++j) z[j] = m[0][j] * y0 + m[1][j] * y1;
  return z;
}

// Real part with a sanity bound on the imaginary component.
inline double real_part(cplx v, double tol = 1e-8) {
  if (std::abs(v.imag()) > tol * std::max(1.0, std::abs(v)))
    throw std::runtime_error("value expected to be real has imaginary part " +
                             std::to_string(v.imag()));
  return v.real();
}

}  // namespace phgeom
