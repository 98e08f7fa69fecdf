#pragma once

#include "batforge/kernels.hpp"

namespace batforge::kernels::detail {

const KernelTable& scalar_table();
#if defined(BATFORGE_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

}  // namespace batforge::kernels::detail
