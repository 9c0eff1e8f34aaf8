#pragma once

#include "etcons/kernels.hpp"

namespace etcons::kernels::detail {

#if defined(ETCONS_HAVE_AVX2)
const GridKernels& avx2_kernels();
#endif
#if defined(ETCONS_HAVE_NEON)
const GridKernels& neon_kernels();
#endif

}  // namespace etcons::kernels::detail
