#include <atomic>
#include <cstdlib>

#include "kernels_impl.hpp"

namespace isingtrack::simd {

namespace {

bool cpu_has_avx2() {
#if defined(ISINGTRACK_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* lookup(std::string_view name) {
  if (name == "scalar") return &scalar_kernels();
  if (name == "avx2") return avx2_kernels();
  return nullptr;
}

const KernelTable* initial_table() {
  if (const char* forced = std::getenv("ISINGTRACK_SIMD")) {
    if (const KernelTable* table = lookup(forced)) return table;
  }
  if (const KernelTable* table = avx2_kernels()) return table;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{initial_table()};
  return slot;
}

}  // namespace

const KernelTable& scalar_kernels() { return detail::kScalarTable; }

const KernelTable* avx2_kernels() {
#if defined(ISINGTRACK_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? &detail::kAvx2Table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() { return *active_slot().load(std::memory_order_acquire); }

bool select(std::string_view name) {
  const KernelTable* table = lookup(name);
  if (!table) return false;
  active_slot().store(table, std::memory_order_release);
  return true;
}

std::vector<std::string_view> available() {
  std::vector<std::string_view> names{"scalar"};
  if (avx2_kernels()) names.push_back("avx2");
  return names;
}

}  // namespace isingtrack::simd
