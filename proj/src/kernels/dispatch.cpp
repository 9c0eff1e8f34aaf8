#include <cstdlib>
#include <string>

#include "etcons/errors.hpp"
#include "etcons/kernels.hpp"
#include "kernel_variants.hpp"

namespace etcons::kernels {

std::string_view to_string(SimdLevel level) {
  switch (level) {
    case SimdLevel::scalar: return "scalar";
    case SimdLevel::avx2: return "avx2";
    case SimdLevel::neon: return "neon";
  }
  return "unknown";
}

bool available(SimdLevel level) {
  switch (level) {
    case SimdLevel::scalar: return true;
    case SimdLevel::avx2:
#if defined(ETCONS_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case SimdLevel::neon:
#if defined(ETCONS_HAVE_NEON)
      return true;  // baseline on aarch64
#else
      return false;
#endif
  }
  return false;
}

SimdLevel detect_simd_level() {
  if (available(SimdLevel::avx2)) return SimdLevel::avx2;
  if (available(SimdLevel::neon)) return SimdLevel::neon;
  return SimdLevel::scalar;
}

const GridKernels& kernels_for(SimdLevel level) {
  if (!available(level))
    throw UsageError("SIMD level '" + std::string(to_string(level)) + "' is not available");
  switch (level) {
#if defined(ETCONS_HAVE_AVX2)
    case SimdLevel::avx2: return detail::avx2_kernels();
#endif
#if defined(ETCONS_HAVE_NEON)
    case SimdLevel::neon: return detail::neon_kernels();
#endif
    default: return scalar_kernels();
  }
}

const GridKernels& active_kernels() {
  static const GridKernels& chosen = [&]() -> const GridKernels& {
    if (const char* env = std::getenv("ETCONS_SIMD")) {
      const std::string want(env);
      for (SimdLevel l : {SimdLevel::scalar, SimdLevel::avx2, SimdLevel::neon})
        if (want == to_string(l) && available(l)) return kernels_for(l);
    }
    return kernels_for(detect_simd_level());
  }();
  return chosen;
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) return 0;
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

}  // namespace etcons::kernels
