#pragma once

#include "crossgcn/types.hpp"

namespace crossgcn::kernels {

enum class Backend { Scalar, Avx2 };

/// Backend in use for all kernel calls. Auto-detected at startup (CPUID);
/// the optional CROSSGCN_BACKEND env var (scalar|avx2) overrides detection.
Backend active_backend();
void set_backend(Backend b);
bool avx2_supported();
const char* backend_name(Backend b);

// All kernels operate on row-major buffers. Every backend accumulates each
// output element in the same sequential order over the contraction index, so
// scalar and SIMD variants produce bit-identical results. The SIMD variants
// vectorize across output columns only and never use fused multiply-add.

/// C (m x n) = A (m x k) * B (k x n). C is overwritten.
void matmul(const real* a, const real* b, real* c, index_t m, index_t k, index_t n);

/// C (rows x n) = S * D for CSR S (rows x cols) and dense D (cols x n).
void spmm(index_t rows, const index_t* indptr, const index_t* indices,
          const real* values, const real* d, real* c, index_t n);

/// C (cols x n) = S^T * D for CSR S (rows x cols) and dense D (rows x n).
/// Scatters row i of D into row indices[p] of C, visiting nonzeros in CSR
/// order so every backend accumulates identically.
void spmm_tn(index_t rows, index_t cols, const index_t* indptr, const index_t* indices,
             const real* values, const real* d, real* c, index_t n);

/// c[i] = a[i] * b[i]
void hadamard(const real* a, const real* b, real* c, index_t n);
/// c[i] += a[i] * b[i]
void hadamard_acc(const real* a, const real* b, real* c, index_t n);
/// c[i] = a[i] + b[i]
void add(const real* a, const real* b, real* c, index_t n);
/// y[i] += alpha * x[i]
void axpy(real alpha, const real* x, real* y, index_t n);
/// c[i] = alpha * a[i]
void scale(const real* a, real alpha, real* c, index_t n);

// Per-backend entry points, exposed so equivalence tests can drive each
// implementation directly regardless of the active backend.
namespace scalar_impl {
void matmul(const real* a, const real* b, real* c, index_t m, index_t k, index_t n);
void spmm(index_t rows, const index_t* indptr, const index_t* indices,
          const real* values, const real* d, real* c, index_t n);
void spmm_tn(index_t rows, index_t cols, const index_t* indptr, const index_t* indices,
             const real* values, const real* d, real* c, index_t n);
void hadamard(const real* a, const real* b, real* c, index_t n);
void hadamard_acc(const real* a, const real* b, real* c, index_t n);
void add(const real* a, const real* b, real* c, index_t n);
void axpy(real alpha, const real* x, real* y, index_t n);
void scale(const real* a, real alpha, real* c, index_t n);
}  // namespace scalar_impl

#if defined(CROSSGCN_BUILD_AVX2)
namespace avx2_impl {
void matmul(const real* a, const real* b, real* c, index_t m, index_t k, index_t n);
void spmm(index_t rows, const index_t* indptr, const index_t* indices,
          const real* values, const real* d, real* c, index_t n);
void spmm_tn(index_t rows, index_t cols, const index_t* indptr, const index_t* indices,
             const real* values, const real* d, real* c, index_t n);
void hadamard(const real* a, const real* b, real* c, index_t n);
void hadamard_acc(const real* a, const real* b, real* c, index_t n);
void add(const real* a, const real* b, real* c, index_t n);
void axpy(real alpha, const real* x, real* y, index_t n);
void scale(const real* a, real alpha, real* c, index_t n);
}  // namespace avx2_impl
#endif

}  // namespace crossgcn::kernels
