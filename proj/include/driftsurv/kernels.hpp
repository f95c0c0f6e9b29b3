#pragma once

// Dense double-precision kernels used by the logistic fitter and the metric
// code. Each kernel has a portable scalar reference and, on x86-64, an AVX2/FMA
// variant. The backend is chosen once at startup from the CPU feature flags
// (override with DRIFTSURV_SIMD=scalar|avx2) and can be pinned in tests.

#include <cstddef>
#include <span>
#include <string_view>

namespace driftsurv::simd {

enum class Backend { Scalar, Avx2 };

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out[r] = X[r, :] . beta for a row-major rows x cols matrix
  void (*gemv)(const double* x, std::size_t rows, std::size_t cols, const double* beta,
               double* out);
  // sum_i (a_i - b_i)^2
  double (*sum_sq_diff)(const double* a, const double* b, std::size_t n);
  // H(upper triangle) += c * x x^T for a cols x cols row-major H
  void (*syr_upper)(double c, const double* x, double* h, std::size_t cols);
};

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gemv(const double* x, std::size_t rows, std::size_t cols, const double* beta, double* out);
double sum_sq_diff(const double* a, const double* b, std::size_t n);
void syr_upper(double c, const double* x, double* h, std::size_t cols);
}  // namespace scalar

namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gemv(const double* x, std::size_t rows, std::size_t cols, const double* beta, double* out);
double sum_sq_diff(const double* a, const double* b, std::size_t n);
void syr_upper(double c, const double* x, double* h, std::size_t cols);
}  // namespace avx2

bool backend_available(Backend b);
Backend active_backend();
std::string_view backend_name(Backend b);
// Throws std::invalid_argument if the backend is not available on this host.
void set_backend(Backend b);
const KernelTable& kernels();
const KernelTable& kernels_for(Backend b);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return kernels().dot(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  kernels().axpy(alpha, x.data(), y.data(), x.size());
}
inline double sum_sq_diff(std::span<const double> a, std::span<const double> b) {
  return kernels().sum_sq_diff(a.data(), b.data(), a.size());
}

}  // namespace driftsurv::simd
