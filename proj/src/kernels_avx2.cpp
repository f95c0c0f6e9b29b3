#include "driftsurv/kernels.hpp"

#include <stdexcept>

#if defined(DRIFTSURV_HAVE_AVX2)
#include <immintrin.h>

namespace driftsurv::simd::avx2 {

namespace {

inline double hsum(__m256d v) {
  // Fixed reduction order so results are reproducible run to run.
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(const double* x, std::size_t rows, std::size_t cols, const double* beta, double* out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = dot(x + r * cols, beta, cols);
}

double sum_sq_diff(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void syr_upper(double c, const double* x, double* h, std::size_t cols) {
  for (std::size_t j = 0; j < cols; ++j) {
    const double cj = c * x[j];
    if (cj == 0.0) continue;
    axpy(cj, x + j, h + j * cols + j, cols - j);
  }
}

}  // namespace driftsurv::simd::avx2

#else

namespace driftsurv::simd::avx2 {

[[noreturn]] static void unavailable() {
  throw std::logic_error("AVX2 kernels were not compiled for this target");
}

double dot(const double*, const double*, std::size_t) { unavailable(); }
void axpy(double, const double*, double*, std::size_t) { unavailable(); }
void gemv(const double*, std::size_t, std::size_t, const double*, double*) { unavailable(); }
double sum_sq_diff(const double*, const double*, std::size_t) { unavailable(); }
void syr_upper(double, const double*, double*, std::size_t) { unavailable(); }

}  // namespace driftsurv::simd::avx2

#endif
