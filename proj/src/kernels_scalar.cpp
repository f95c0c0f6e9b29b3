#include "driftsurv/kernels.hpp"

namespace driftsurv::simd::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(const double* x, std::size_t rows, std::size_t cols, const double* beta, double* out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = dot(x + r * cols, beta, cols);
}

double sum_sq_diff(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
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

}  // namespace driftsurv::simd::scalar
