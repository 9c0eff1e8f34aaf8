#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Batched arithmetic for grid verification of two-dimensional models: CMF
// margins, Jacobian spectral norms and Euclidean norms over structure-of-arrays
// inputs. Every variant evaluates the same expression tree in the same order
// without FMA, so SIMD and scalar results are bit-identical.
namespace etcons::kernels {

// Structure-of-arrays batch of 2x2 matrices [[m00, m01], [m10, m11]].
struct Batch2x2 {
  std::span<const double> m00;
  std::span<const double> m01;
  std::span<const double> m10;
  std::span<const double> m11;

  std::size_t size() const noexcept { return m00.size(); }
};

// Constants of the CMF expression JᵀP + PJ + C, with C = qP − ρPBBᵀP.
struct CmfConstants2 {
  double p00 = 0.0, p01 = 0.0, p11 = 0.0;
  double c00 = 0.0, c01 = 0.0, c11 = 0.0;
};

using CmfMarginsFn = void (*)(const Batch2x2& jac, const CmfConstants2& k, std::span<double> out);
using SpectralNormsFn = void (*)(const Batch2x2& m, std::span<double> out);
using Norms2Fn = void (*)(std::span<const double> x, std::span<const double> y, std::span<double> out);

struct GridKernels {
  std::string_view name;
  // out[k] = λmax(J_kᵀP + P J_k + C)
  CmfMarginsFn cmf_margins;
  // out[k] = largest singular value of M_k
  SpectralNormsFn spectral_norms;
  // out[k] = sqrt(x_k² + y_k²)
  Norms2Fn norms2;
};

enum class SimdLevel { scalar, avx2, neon };

std::string_view to_string(SimdLevel level);

const GridKernels& scalar_kernels();

// Best level supported by both the build and the running CPU.
SimdLevel detect_simd_level();
bool available(SimdLevel level);
// Throws UsageError if the level is not available on this build/CPU.
const GridKernels& kernels_for(SimdLevel level);
// detect_simd_level(), unless ETCONS_SIMD=scalar|avx2|neon overrides it.
const GridKernels& active_kernels();

// Index of the largest element (first on ties); size() when empty.
std::size_t argmax(std::span<const double> values);

}  // namespace etcons::kernels
