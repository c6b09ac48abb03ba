#include "crossgcn/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

namespace crossgcn::kernels {

bool avx2_supported() {
#if defined(CROSSGCN_BUILD_AVX2) && defined(__GNUC__)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

namespace {

Backend detect_backend() {
  if (const char* env = std::getenv("CROSSGCN_BACKEND")) {
    const std::string v(env);
    if (v == "scalar") return Backend::Scalar;
    if (v == "avx2") {
      if (!avx2_supported())
        throw std::runtime_error("CROSSGCN_BACKEND=avx2 but AVX2 is unavailable");
      return Backend::Avx2;
    }
    throw std::runtime_error("unknown CROSSGCN_BACKEND value: " + v);
  }
  return avx2_supported() ? Backend::Avx2 : Backend::Scalar;
}

Backend& backend_slot() {
  static Backend b = detect_backend();
  return b;
}

}  // namespace

Backend active_backend() { return backend_slot(); }

void set_backend(Backend b) {
  if (b == Backend::Avx2 && !avx2_supported())
    throw std::runtime_error("cannot select AVX2 backend: not supported on this CPU/build");
  backend_slot() = b;
}

const char* backend_name(Backend b) {
  return b == Backend::Avx2 ? "avx2" : "scalar";
}

#if defined(CROSSGCN_BUILD_AVX2)
#define CROSSGCN_DISPATCH(fn, ...)                                   \
  do {                                                               \
    if (backend_slot() == Backend::Avx2)                             \
      avx2_impl::fn(__VA_ARGS__);                                    \
    else                                                             \
      scalar_impl::fn(__VA_ARGS__);                                  \
  } while (0)
#else
#define CROSSGCN_DISPATCH(fn, ...) scalar_impl::fn(__VA_ARGS__)
#endif

void matmul(const real* a, const real* b, real* c, index_t m, index_t k, index_t n) {
  CROSSGCN_DISPATCH(matmul, a, b, c, m, k, n);
}

void spmm(index_t rows, const index_t* indptr, const index_t* indices,
          const real* values, const real* d, real* c, index_t n) {
  CROSSGCN_DISPATCH(spmm, rows, indptr, indices, values, d, c, n);
}

void spmm_tn(index_t rows, index_t cols, const index_t* indptr, const index_t* indices,
             const real* values, const real* d, real* c, index_t n) {
  CROSSGCN_DISPATCH(spmm_tn, rows, cols, indptr, indices, values, d, c, n);
}

void hadamard(const real* a, const real* b, real* c, index_t n) {
  CROSSGCN_DISPATCH(hadamard, a, b, c, n);
}

void hadamard_acc(const real* a, const real* b, real* c, index_t n) {
  CROSSGCN_DISPATCH(hadamard_acc, a, b, c, n);
}

void add(const real* a, const real* b, real* c, index_t n) {
  CROSSGCN_DISPATCH(add, a, b, c, n);
}

void axpy(real alpha, const real* x, real* y, index_t n) {
  CROSSGCN_DISPATCH(axpy, alpha, x, y, n);
}

void scale(const real* a, real alpha, real* c, index_t n) {
  CROSSGCN_DISPATCH(scale, a, alpha, c, n);
}

#undef CROSSGCN_DISPATCH

}  // namespace crossgcn::kernels
