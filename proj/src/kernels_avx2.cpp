#include "crossgcn/kernels.hpp"

#if defined(CROSSGCN_BUILD_AVX2)

#include <immintrin.h>

#include <cstring>

// Vectorization is across output columns only: each c[i][j] is still
// accumulated in the same k-order as the scalar kernel, and multiply/add stay
// separate instructions (no FMA), so results are bit-identical to scalar.

namespace crossgcn::kernels::avx2_impl {

namespace {
constexpr index_t kLanes = 4;  // doubles per __m256d
}

void matmul(const real* a, const real* b, real* c, index_t m, index_t k, index_t n) {
  std::memset(c, 0, static_cast<std::size_t>(m) * static_cast<std::size_t>(n) * sizeof(real));
  const index_t nvec = n - (n % kLanes);
  for (index_t i = 0; i < m; ++i) {
    const real* arow = a + i * k;
    real* crow = c + i * n;
    for (index_t kk = 0; kk < k; ++kk) {
      const real aik = arow[kk];
      const real* brow = b + kk * n;
      const __m256d va = _mm256_set1_pd(aik);
      index_t j = 0;
      for (; j < nvec; j += kLanes) {
        __m256d vb = _mm256_loadu_pd(brow + j);
        __m256d vc = _mm256_loadu_pd(crow + j);
        vc = _mm256_add_pd(vc, _mm256_mul_pd(va, vb));
        _mm256_storeu_pd(crow + j, vc);
      }
      for (; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
}

void spmm(index_t rows, const index_t* indptr, const index_t* indices,
          const real* values, const real* d, real* c, index_t n) {
  std::memset(c, 0, static_cast<std::size_t>(rows) * static_cast<std::size_t>(n) * sizeof(real));
  const index_t nvec = n - (n % kLanes);
  for (index_t i = 0; i < rows; ++i) {
    real* crow = c + i * n;
    for (index_t p = indptr[i]; p < indptr[i + 1]; ++p) {
      const real v = values[p];
      const real* drow = d + indices[p] * n;
      const __m256d vv = _mm256_set1_pd(v);
      index_t j = 0;
      for (; j < nvec; j += kLanes) {
        __m256d vd = _mm256_loadu_pd(drow + j);
        __m256d vc = _mm256_loadu_pd(crow + j);
        vc = _mm256_add_pd(vc, _mm256_mul_pd(vv, vd));
        _mm256_storeu_pd(crow + j, vc);
      }
      for (; j < n; ++j) crow[j] += v * drow[j];
    }
  }
}

void spmm_tn(index_t rows, index_t cols, const index_t* indptr, const index_t* indices,
             const real* values, const real* d, real* c, index_t n) {
  std::memset(c, 0, static_cast<std::size_t>(cols) * static_cast<std::size_t>(n) * sizeof(real));
  const index_t nvec = n - (n % kLanes);
  for (index_t i = 0; i < rows; ++i) {
    const real* drow = d + i * n;
    for (index_t p = indptr[i]; p < indptr[i + 1]; ++p) {
      const real v = values[p];
      real* crow = c + indices[p] * n;
      const __m256d vv = _mm256_set1_pd(v);
      index_t j = 0;
      for (; j < nvec; j += kLanes) {
        __m256d vd = _mm256_loadu_pd(drow + j);
        __m256d vc = _mm256_loadu_pd(crow + j);
        vc = _mm256_add_pd(vc, _mm256_mul_pd(vv, vd));
        _mm256_storeu_pd(crow + j, vc);
      }
      for (; j < n; ++j) crow[j] += v * drow[j];
    }
  }
}

void hadamard(const real* a, const real* b, real* c, index_t n) {
  const index_t nvec = n - (n % kLanes);
  index_t i = 0;
  for (; i < nvec; i += kLanes) {
    __m256d va = _mm256_loadu_pd(a + i);
    __m256d vb = _mm256_loadu_pd(b + i);
    _mm256_storeu_pd(c + i, _mm256_mul_pd(va, vb));
  }
  for (; i < n; ++i) c[i] = a[i] * b[i];
}

void hadamard_acc(const real* a, const real* b, real* c, index_t n) {
  const index_t nvec = n - (n % kLanes);
  index_t i = 0;
  for (; i < nvec; i += kLanes) {
    __m256d va = _mm256_loadu_pd(a + i);
    __m256d vb = _mm256_loadu_pd(b + i);
    __m256d vc = _mm256_loadu_pd(c + i);
    _mm256_storeu_pd(c + i, _mm256_add_pd(vc, _mm256_mul_pd(va, vb)));
  }
  for (; i < n; ++i) c[i] += a[i] * b[i];
}

void add(const real* a, const real* b, real* c, index_t n) {
  const index_t nvec = n - (n % kLanes);
  index_t i = 0;
  for (; i < nvec; i += kLanes) {
    __m256d va = _mm256_loadu_pd(a + i);
    __m256d vb = _mm256_loadu_pd(b + i);
    _mm256_storeu_pd(c + i, _mm256_add_pd(va, vb));
  }
  for (; i < n; ++i) c[i] = a[i] + b[i];
}

void axpy(real alpha, const real* x, real* y, index_t n) {
  const index_t nvec = n - (n % kLanes);
  const __m256d va = _mm256_set1_pd(alpha);
  index_t i = 0;
  for (; i < nvec; i += kLanes) {
    __m256d vx = _mm256_loadu_pd(x + i);
    __m256d vy = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(va, vx)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale(const real* a, real alpha, real* c, index_t n) {
  const index_t nvec = n - (n % kLanes);
  const __m256d va = _mm256_set1_pd(alpha);
  index_t i = 0;
  for (; i < nvec; i += kLanes) {
    __m256d vx = _mm256_loadu_pd(a + i);
    _mm256_storeu_pd(c + i, _mm256_mul_pd(va, vx));
  }
  for (; i < n; ++i) c[i] = alpha * a[i];
}

}  // namespace crossgcn::kernels::avx2_impl

#endif  // CROSSGCN_BUILD_AVX2
