// Compiled with -mavx2 -mfma. Only intrinsics live here: no inline library
// templates may be instantiated with the wider ISA in this translation unit.

#include <immintrin.h>

#include "kernels_impl.hpp"

namespace isingtrack::simd::detail {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd();
  __m256d acc3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), acc2);
    acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), acc3);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double acc = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_avx2(const double* a, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(a + i + 4));
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i];
  return acc;
}

double centered_dot_avx2(const double* a, double mean_a, const double* b, double mean_b,
                         std::size_t n) {
  const __m256d ma = _mm256_set1_pd(mean_a);
  const __m256d mb = _mm256_set1_pd(mean_b);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d da0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), ma);
    __m256d db0 = _mm256_sub_pd(_mm256_loadu_pd(b + i), mb);
    __m256d da1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), ma);
    __m256d db1 = _mm256_sub_pd(_mm256_loadu_pd(b + i + 4), mb);
    acc0 = _mm256_fmadd_pd(da0, db0, acc0);
    acc1 = _mm256_fmadd_pd(da1, db1, acc1);
  }
  for (; i + 4 <= n; i += 4) {
    __m256d da = _mm256_sub_pd(_mm256_loadu_pd(a + i), ma);
    __m256d db = _mm256_sub_pd(_mm256_loadu_pd(b + i), mb);
    acc0 = _mm256_fmadd_pd(da, db, acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += (a[i] - mean_a) * (b[i] - mean_b);
  return acc;
}

void grow_avx2(double* w, const double* r, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d factor = _mm256_add_pd(one, _mm256_loadu_pd(r + i));
    _mm256_storeu_pd(w + i, _mm256_mul_pd(_mm256_loadu_pd(w + i), factor));
  }
  for (; i < n; ++i) w[i] *= 1.0 + r[i];
}

}  // namespace

const KernelTable kAvx2Table{"avx2", dot_avx2, sum_avx2, centered_dot_avx2, grow_avx2};

}  // namespace isingtrack::simd::detail
