#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "driftsurv/kernels.hpp"

namespace driftsurv::simd {

namespace {

constexpr KernelTable kScalarTable{scalar::dot, scalar::axpy, scalar::gemv, scalar::sum_sq_diff,
                                   scalar::syr_upper};
constexpr KernelTable kAvx2Table{avx2::dot, avx2::axpy, avx2::gemv, avx2::sum_sq_diff,
                                 avx2::syr_upper};

bool cpu_has_avx2() {
#if defined(DRIFTSURV_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend detect() {
  if (const char* env = std::getenv("DRIFTSURV_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return Backend::Scalar;
    if (v == "avx2" && cpu_has_avx2()) return Backend::Avx2;
  }
  return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> b{detect()};
  return b;
}

}  // namespace

bool backend_available(Backend b) { return b == Backend::Scalar || cpu_has_avx2(); }

Backend active_backend() { return current().load(std::memory_order_relaxed); }

std::string_view backend_name(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

void set_backend(Backend b) {
  if (!backend_available(b)) throw std::invalid_argument("SIMD backend not available on this host");
  current().store(b, std::memory_order_relaxed);
}

const KernelTable& kernels_for(Backend b) { return b == Backend::Avx2 ? kAvx2Table : kScalarTable; }

const KernelTable& kernels() { return kernels_for(active_backend()); }

}  // namespace driftsurv::simd
