#include <immintrin.h>

#include <cmath>
#include <stdexcept>

#include "kernel_variants.hpp"

namespace etcons::kernels::detail {
namespace {

constexpr std::size_t kLanes = 4;

void check_sizes(const Batch2x2& m, std::span<double> out) {
  const std::size_t n = m.size();
  if (m.m01.size() != n || m.m10.size() != n || m.m11.size() != n || out.size() != n)
    throw std::invalid_argument("grid kernel: batch size mismatch");
}

void cmf_margins_avx2(const Batch2x2& jac, const CmfConstants2& k, std::span<double> out) {
  check_sizes(jac, out);
  const std::size_t n = jac.size();
  const __m256d p00 = _mm256_set1_pd(k.p00), p01 = _mm256_set1_pd(k.p01), p11 = _mm256_set1_pd(k.p11);
  const __m256d c00 = _mm256_set1_pd(k.c00), c01 = _mm256_set1_pd(k.c01), c11 = _mm256_set1_pd(k.c11);
  const __m256d half = _mm256_set1_pd(0.5);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d a = _mm256_loadu_pd(jac.m00.data() + i);
    const __m256d b = _mm256_loadu_pd(jac.m01.data() + i);
    const __m256d c = _mm256_loadu_pd(jac.m10.data() + i);
    const __m256d d = _mm256_loadu_pd(jac.m11.data() + i);
    const __m256d pj00 = _mm256_add_pd(_mm256_mul_pd(p00, a), _mm256_mul_pd(p01, c));
    const __m256d pj01 = _mm256_add_pd(_mm256_mul_pd(p00, b), _mm256_mul_pd(p01, d));
    const __m256d pj10 = _mm256_add_pd(_mm256_mul_pd(p01, a), _mm256_mul_pd(p11, c));
    const __m256d pj11 = _mm256_add_pd(_mm256_mul_pd(p01, b), _mm256_mul_pd(p11, d));
    const __m256d m00 = _mm256_add_pd(_mm256_add_pd(pj00, pj00), c00);
    const __m256d m11 = _mm256_add_pd(_mm256_add_pd(pj11, pj11), c11);
    const __m256d m01 = _mm256_add_pd(_mm256_add_pd(pj01, pj10), c01);
    const __m256d hs = _mm256_mul_pd(half, _mm256_add_pd(m00, m11));
    const __m256d hd = _mm256_mul_pd(half, _mm256_sub_pd(m00, m11));
    const __m256d rad = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(hd, hd), _mm256_mul_pd(m01, m01)));
    _mm256_storeu_pd(out.data() + i, _mm256_add_pd(hs, rad));
  }
  if (i < n) {
    const Batch2x2 tail{jac.m00.subspan(i), jac.m01.subspan(i), jac.m10.subspan(i), jac.m11.subspan(i)};
    scalar_kernels().cmf_margins(tail, k, out.subspan(i));
  }
}

void spectral_norms_avx2(const Batch2x2& m, std::span<double> out) {
  check_sizes(m, out);
  const std::size_t n = m.size();
  const __m256d half = _mm256_set1_pd(0.5);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d a = _mm256_loadu_pd(m.m00.data() + i);
    const __m256d b = _mm256_loadu_pd(m.m01.data() + i);
    const __m256d c = _mm256_loadu_pd(m.m10.data() + i);
    const __m256d d = _mm256_loadu_pd(m.m11.data() + i);
    const __m256d t00 = _mm256_add_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(c, c));
    const __m256d t11 = _mm256_add_pd(_mm256_mul_pd(b, b), _mm256_mul_pd(d, d));
    const __m256d t01 = _mm256_add_pd(_mm256_mul_pd(a, b), _mm256_mul_pd(c, d));
    const __m256d hs = _mm256_mul_pd(half, _mm256_add_pd(t00, t11));
    const __m256d hd = _mm256_mul_pd(half, _mm256_sub_pd(t00, t11));
    const __m256d rad = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(hd, hd), _mm256_mul_pd(t01, t01)));
    _mm256_storeu_pd(out.data() + i, _mm256_sqrt_pd(_mm256_add_pd(hs, rad)));
  }
  if (i < n) {
    const Batch2x2 tail{m.m00.subspan(i), m.m01.subspan(i), m.m10.subspan(i), m.m11.subspan(i)};
    scalar_kernels().spectral_norms(tail, out.subspan(i));
  }
}

void norms2_avx2(std::span<const double> x, std::span<const double> y, std::span<double> out) {
  if (x.size() != y.size() || x.size() != out.size())
    throw std::invalid_argument("grid kernel: batch size mismatch");
  const std::size_t n = x.size();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d vx = _mm256_loadu_pd(x.data() + i);
    const __m256d vy = _mm256_loadu_pd(y.data() + i);
    _mm256_storeu_pd(out.data() + i,
                     _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(vx, vx), _mm256_mul_pd(vy, vy))));
  }
  if (i < n) scalar_kernels().norms2(x.subspan(i), y.subspan(i), out.subspan(i));
}

}  // namespace

const GridKernels& avx2_kernels() {
  static const GridKernels k{"avx2", cmf_margins_avx2, spectral_norms_avx2, norms2_avx2};
  return k;
}

}  // namespace etcons::kernels::detail
