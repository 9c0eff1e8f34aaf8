#include <arm_neon.h>

#include <stdexcept>

#include "kernel_variants.hpp"

namespace etcons::kernels::detail {
namespace {

constexpr std::size_t kLanes = 2;

void check_sizes(const Batch2x2& m, std::span<double> out) {
  const std::size_t n = m.size();
  if (m.m01.size() != n || m.m10.size() != n || m.m11.size() != n || out.size() != n)
    throw std::invalid_argument("grid kernel: batch size mismatch");
}

// vmulq/vaddq only: vfmaq would round differently from the scalar reference.
void cmf_margins_neon(const Batch2x2& jac, const CmfConstants2& k, std::span<double> out) {
  check_sizes(jac, out);
  const std::size_t n = jac.size();
  const float64x2_t p00 = vdupq_n_f64(k.p00), p01 = vdupq_n_f64(k.p01), p11 = vdupq_n_f64(k.p11);
  const float64x2_t c00 = vdupq_n_f64(k.c00), c01 = vdupq_n_f64(k.c01), c11 = vdupq_n_f64(k.c11);
  const float64x2_t half = vdupq_n_f64(0.5);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float64x2_t a = vld1q_f64(jac.m00.data() + i);
    const float64x2_t b = vld1q_f64(jac.m01.data() + i);
    const float64x2_t c = vld1q_f64(jac.m10.data() + i);
    const float64x2_t d = vld1q_f64(jac.m11.data() + i);
    const float64x2_t pj00 = vaddq_f64(vmulq_f64(p00, a), vmulq_f64(p01, c));
    const float64x2_t pj01 = vaddq_f64(vmulq_f64(p00, b), vmulq_f64(p01, d));
    const float64x2_t pj10 = vaddq_f64(vmulq_f64(p01, a), vmulq_f64(p11, c));
    const float64x2_t pj11 = vaddq_f64(vmulq_f64(p01, b), vmulq_f64(p11, d));
    const float64x2_t m00 = vaddq_f64(vaddq_f64(pj00, pj00), c00);
    const float64x2_t m11 = vaddq_f64(vaddq_f64(pj11, pj11), c11);
    const float64x2_t m01 = vaddq_f64(vaddq_f64(pj01, pj10), c01);
    const float64x2_t hs = vmulq_f64(half, vaddq_f64(m00, m11));
    const float64x2_t hd = vmulq_f64(half, vsubq_f64(m00, m11));
    const float64x2_t rad = vsqrtq_f64(vaddq_f64(vmulq_f64(hd, hd), vmulq_f64(m01, m01)));
    vst1q_f64(out.data() + i, vaddq_f64(hs, rad));
  }
  if (i < n) {
    const Batch2x2 tail{jac.m00.subspan(i), jac.m01.subspan(i), jac.m10.subspan(i), jac.m11.subspan(i)};
    scalar_kernels().cmf_margins(tail, k, out.subspan(i));
  }
}

void spectral_norms_neon(const Batch2x2& m, std::span<double> out) {
  check_sizes(m, out);
  const std::size_t n = m.size();
  const float64x2_t half = vdupq_n_f64(0.5);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float64x2_t a = vld1q_f64(m.m00.data() + i);
    const float64x2_t b = vld1q_f64(m.m01.data() + i);
    const float64x2_t c = vld1q_f64(m.m10.data() + i);
    const float64x2_t d = vld1q_f64(m.m11.data() + i);
    const float64x2_t t00 = vaddq_f64(vmulq_f64(a, a), vmulq_f64(c, c));
    const float64x2_t t11 = vaddq_f64(vmulq_f64(b, b), vmulq_f64(d, d));
    const float64x2_t t01 = vaddq_f64(vmulq_f64(a, b), vmulq_f64(c, d));
    const float64x2_t hs = vmulq_f64(half, vaddq_f64(t00, t11));
    const float64x2_t hd = vmulq_f64(half, vsubq_f64(t00, t11));
    const float64x2_t rad = vsqrtq_f64(vaddq_f64(vmulq_f64(hd, hd), vmulq_f64(t01, t01)));
    vst1q_f64(out.data() + i, vsqrtq_f64(vaddq_f64(hs, rad)));
  }
  if (i < n) {
    const Batch2x2 tail{m.m00.subspan(i), m.m01.subspan(i), m.m10.subspan(i), m.m11.subspan(i)};
    scalar_kernels().spectral_norms(tail, out.subspan(i));
  }
}

void norms2_neon(std::span<const double> x, std::span<const double> y, std::span<double> out) {
  if (x.size() != y.size() || x.size() != out.size())
    throw std::invalid_argument("grid kernel: batch size mismatch");
  const std::size_t n = x.size();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float64x2_t vx = vld1q_f64(x.data() + i);
    const float64x2_t vy = vld1q_f64(y.data() + i);
    vst1q_f64(out.data() + i, vsqrtq_f64(vaddq_f64(vmulq_f64(vx, vx), vmulq_f64(vy, vy))));
  }
  if (i < n) scalar_kernels().norms2(x.subspan(i), y.subspan(i), out.subspan(i));
}

}  // namespace

const GridKernels& neon_kernels() {
  static const GridKernels k{"neon", cmf_margins_neon, spectral_norms_neon, norms2_neon};
  return k;
}

}  // namespace etcons::kernels::detail
