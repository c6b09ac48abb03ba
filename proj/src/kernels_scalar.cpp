#include "crossgcn/kernels.hpp"

#include <cstring>

namespace crossgcn::kernels::scalar_impl {

void matmul(const real* a, const real* b, real* c, index_t m, index_t k, index_t n) {
  std::memset(c, 0, static_cast<std::size_t>(m) * static_cast<std::size_t>(n) * sizeof(real));
  for (index_t i = 0; i < m; ++i) {
    const real* arow = a + i * k;
    real* crow = c + i * n;
    for (index_t kk = 0; kk < k; ++kk) {
      const real aik = arow[kk];
      const real* brow = b + kk * n;
      for (index_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
}

void spmm(index_t rows, const index_t* indptr, const index_t* indices,
          const real* values, const real* d, real* c, index_t n) {
  std::memset(c, 0, static_cast<std::size_t>(rows) * static_cast<std::size_t>(n) * sizeof(real));
  for (index_t i = 0; i < rows; ++i) {
    real* crow = c + i * n;
    for (index_t p = indptr[i]; p < indptr[i + 1]; ++p) {
      const real v = values[p];
      const real* drow = d + indices[p] * n;
      for (index_t j = 0; j < n; ++j) crow[j] += v * drow[j];
    }
  }
}

void spmm_tn(index_t rows, index_t cols, const index_t* indptr, const index_t* indices,
             const real* values, const real* d, real* c, index_t n) {
  std::memset(c, 0, static_cast<std::size_t>(cols) * static_cast<std::size_t>(n) * sizeof(real));
  for (index_t i = 0; i < rows; ++i) {
    const real* drow = d + i * n;
    for (index_t p = indptr[i]; p < indptr[i + 1]; ++p) {
      const real v = values[p];
      real* crow = c + indices[p] * n;
      for (index_t j = 0; j < n; ++j) crow[j] += v * drow[j];
    }
  }
}

void hadamard(const real* a, const real* b, real* c, index_t n) {
  for (index_t i = 0; i < n; ++i) c[i] = a[i] * b[i];
}

void hadamard_acc(const real* a, const real* b, real* c, index_t n) {
  for (index_t i = 0; i < n; ++i) c[i] += a[i] * b[i];
}

void add(const real* a, const real* b, real* c, index_t n) {
  for (index_t i = 0; i < n; ++i) c[i] = a[i] + b[i];
}

void axpy(real alpha, const real* x, real* y, index_t n) {
  for (index_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale(const real* a, real alpha, real* c, index_t n) {
  for (index_t i = 0; i < n; ++i) c[i] = alpha * a[i];
}

}  // namespace crossgcn::kernels::scalar_impl
