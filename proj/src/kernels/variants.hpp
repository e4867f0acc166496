#pragma once

#include "ahcrf/kernels.hpp"

namespace ahcrf::kernels::detail {

const KernelTable& scalar_table() noexcept;

#if defined(AHCRF_HAVE_AVX2_TU)
const KernelTable& avx2_table() noexcept;
#endif

}  // namespace ahcrf::kernels::detail
