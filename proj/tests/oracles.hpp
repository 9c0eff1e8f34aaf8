#pragma once

// Independent reference computations. Nothing here calls into the library's
// numerics, so agreement with it is evidence rather than tautology.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "etcons/linalg.hpp"

namespace oracle {

using Rows = std::vector<std::vector<long double>>;

inline Rows to_rows(const etcons::Matrix& a) {
  Rows r(a.rows(), std::vector<long double>(a.cols()));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r[i][j] = a(i, j);
  return r;
}

// det(λI − A) by Gaussian elimination with partial pivoting in long double.
inline long double char_poly(const Rows& a, long double lambda) {
  const std::size_t n = a.size();
  Rows m(n, std::vector<long double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i][j] = (i == j ? lambda : 0.0L) - a[i][j];
  long double det = 1.0L;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::fabs(m[r][c]) > std::fabs(m[p][c])) p = r;
    if (m[p][c] == 0.0L) return 0.0L;
    if (p != c) {
      std::swap(m[p], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const long double f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

inline long double bisect(const Rows& a, long double lo, long double hi) {
  long double flo = char_poly(a, lo);
  for (int it = 0; it < 200; ++it) {
    const long double mid = 0.5L * (lo + hi);
    const long double fm = char_poly(a, mid);
    if (fm == 0.0L) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5L * (lo + hi);
}

// All simple real roots of the characteristic polynomial of a symmetric matrix, found
// by scanning the Gershgorin interval for sign changes and bisecting each bracket.
// Exact zeros on the scan grid are also reported.
inline std::vector<double> eigenvalues(const etcons::Matrix& a, int scan = 20000) {
  const Rows r = to_rows(a);
  long double lo = 0, hi = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    long double rad = 0;
    for (std::size_t j = 0; j < r.size(); ++j)
      if (j != i) rad += std::fabs(r[i][j]);
    lo = std::min(lo, r[i][i] - rad);
    hi = std::max(hi, r[i][i] + rad);
  }
  lo -= 1e-3L;
  hi += 1e-3L;
  std::vector<double> roots;
  const long double dx = (hi - lo) / scan;
  long double x0 = lo, f0 = char_poly(r, x0);
  for (int s = 1; s <= scan; ++s) {
    const long double x1 = lo + dx * s;
    const long double f1 = char_poly(r, x1);
    if (f1 == 0.0L) {
      roots.push_back(static_cast<double>(x1));
    } else if (f0 != 0.0L && (f0 < 0) != (f1 < 0)) {
      roots.push_back(static_cast<double>(bisect(r, x0, x1)));
    }
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

// Explicit RK4 written out stage by stage.
inline std::vector<double> rk4(const std::function<std::vector<double>(const std::vector<double>&)>& f,
                               std::vector<double> x, double h, long steps) {
  const std::size_t n = x.size();
  std::vector<double> tmp(n);
  for (long s = 0; s < steps; ++s) {
    const auto k1 = f(x);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h / 2 * k1[i];
    const auto k2 = f(tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h / 2 * k2[i];
    const auto k3 = f(tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
    const auto k4 = f(tmp);
    for (std::size_t i = 0; i < n; ++i) x[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }
  return x;
}

// The two-state example system, transcribed independently.
inline std::vector<double> paper_f(const std::vector<double>& z, double th) {
  return {z[1] + th * std::cos(z[1]), -z[0] + th * std::cos(z[1]) + th * th * std::cos(z[0]) * std::sin(z[0])};
}

inline etcons::Matrix random_symmetric(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  etcons::Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = u(rng);
  return m;
}

}  // namespace oracle
