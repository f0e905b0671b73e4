#pragma once

#include "isingtrack/kernels.hpp"

namespace isingtrack::simd::detail {

extern const KernelTable kScalarTable;
#if defined(ISINGTRACK_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif

}  // namespace isingtrack::simd::detail
