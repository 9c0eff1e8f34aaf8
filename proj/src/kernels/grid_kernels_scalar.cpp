#include <cmath>
#include <stdexcept>

#include "etcons/kernels.hpp"

namespace etcons::kernels {
namespace {

void check_sizes(const Batch2x2& m, std::span<double> out) {
  const std::size_t n = m.size();
  if (m.m01.size() != n || m.m10.size() != n || m.m11.size() != n || out.size() != n)
    throw std::invalid_argument("grid kernel: batch size mismatch");
}

void cmf_margins_scalar(const Batch2x2& jac, const CmfConstants2& k, std::span<double> out) {
  check_sizes(jac, out);
  for (std::size_t i = 0; i < jac.size(); ++i) {
    const double a = jac.m00[i], b = jac.m01[i], c = jac.m10[i], d = jac.m11[i];
    // PJ = [[p00 a + p01 c, p00 b + p01 d], [p01 a + p11 c, p01 b + p11 d]]
    const double pj00 = k.p00 * a + k.p01 * c;
    const double pj01 = k.p00 * b + k.p01 * d;
    const double pj10 = k.p01 * a + k.p11 * c;
    const double pj11 = k.p01 * b + k.p11 * d;
    const double m00 = (pj00 + pj00) + k.c00;
    const double m11 = (pj11 + pj11) + k.c11;
    const double m01 = (pj01 + pj10) + k.c01;
    const double half_sum = 0.5 * (m00 + m11);
    const double half_diff = 0.5 * (m00 - m11);
    out[i] = half_sum + std::sqrt(half_diff * half_diff + m01 * m01);
  }
}

void spectral_norms_scalar(const Batch2x2& m, std::span<double> out) {
  check_sizes(m, out);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double a = m.m00[i], b = m.m01[i], c = m.m10[i], d = m.m11[i];
    const double t00 = a * a + c * c;
    const double t11 = b * b + d * d;
    const double t01 = a * b + c * d;
    const double half_sum = 0.5 * (t00 + t11);
    const double half_diff = 0.5 * (t00 - t11);
    const double lmax = half_sum + std::sqrt(half_diff * half_diff + t01 * t01);
    out[i] = std::sqrt(lmax);
  }
}

void norms2_scalar(std::span<const double> x, std::span<const double> y, std::span<double> out) {
  if (x.size() != y.size() || x.size() != out.size())
    throw std::invalid_argument("grid kernel: batch size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::sqrt(x[i] * x[i] + y[i] * y[i]);
}

}  // namespace

const GridKernels& scalar_kernels() {
  static const GridKernels k{"scalar", cmf_margins_scalar, spectral_norms_scalar, norms2_scalar};
  return k;
}

}  // namespace etcons::kernels
