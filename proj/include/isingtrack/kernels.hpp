#pragma once

// Arithmetic inner loops shared by the estimators, the Gibbs sampler and the
// backtester. Every kernel has a scalar reference implementation; wider
// variants are compiled separately and chosen once at runtime from the CPU
// feature set. The ISINGTRACK_SIMD environment variable (`scalar`, `avx2`)
// overrides the choice.

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace isingtrack::simd {

struct KernelTable {
  std::string_view name;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i a[i]
  double (*sum)(const double* a, std::size_t n);
  // sum_i (a[i] - mean_a) * (b[i] - mean_b)
  double (*centered_dot)(const double* a, double mean_a, const double* b, double mean_b,
                         std::size_t n);
  // w[i] *= 1 + r[i]; bit-identical across variants
  void (*grow)(double* w, const double* r, std::size_t n);
};

const KernelTable& scalar_kernels();
/// AVX2+FMA table, or nullptr when not compiled in or unsupported by this CPU.
const KernelTable* avx2_kernels();

/// Kernels in use by the library.
const KernelTable& active();
/// Switch the active table by name; returns false for an unknown or unavailable name.
bool select(std::string_view name);
std::vector<std::string_view> available();

inline double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active().dot(a.data(), b.data(), a.size());
}

inline double sum(std::span<const double> a) { return active().sum(a.data(), a.size()); }

/// Exact for constant input, so centred sums of a constant series are zero.
inline double mean(std::span<const double> a) {
  if (a.empty()) return 0.0;
  if (std::all_of(a.begin(), a.end(), [&](double x) { return x == a.front(); })) return a.front();
  return sum(a) / static_cast<double>(a.size());
}

inline double centered_dot(std::span<const double> a, double mean_a, std::span<const double> b,
                           double mean_b) {
  assert(a.size() == b.size());
  return active().centered_dot(a.data(), mean_a, b.data(), mean_b, a.size());
}

inline void grow(std::span<double> w, std::span<const double> r) {
  assert(w.size() == r.size());
  active().grow(w.data(), r.data(), w.size());
}

}  // namespace isingtrack::simd
