#include "kernels_impl.hpp"

namespace isingtrack::simd::detail {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

double centered_dot_scalar(const double* a, double mean_a, const double* b, double mean_b,
                           std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += (a[i] - mean_a) * (b[i] - mean_b);
  return acc;
}

void grow_scalar(double* w, const double* r, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) w[i] *= 1.0 + r[i];
}

}  // namespace

const KernelTable kScalarTable{"scalar", dot_scalar, sum_scalar, centered_dot_scalar, grow_scalar};

}  // namespace isingtrack::simd::detail
