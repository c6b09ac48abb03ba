#pragma once

#include "crossgcn/csr.hpp"
#include "crossgcn/dense.hpp"

namespace crossgcn::ops {

/// A (m x k) * B (k x n). Throws ShapeError naming both shapes on mismatch.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
/// A * B^T, computed as matmul(A, transpose(B)) so the accumulation order
/// matches the plain matmul kernel bit-for-bit.
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);
/// A^T * B, computed as matmul(transpose(A), B).
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);

DenseMatrix transpose(const DenseMatrix& a);

/// S (r x c) * D (c x n) for sparse S.
DenseMatrix spmm(const SparseMatrixCSR& s, const DenseMatrix& d);

/// S^T (c x r) * D (r x n) for sparse S, without materializing S^T.
DenseMatrix spmm_tn(const SparseMatrixCSR& s, const DenseMatrix& d);

DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b);
/// c += a ⊙ b, in place.
void hadamard_acc(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& c);
DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix sub(const DenseMatrix& a, const DenseMatrix& b);
/// y += alpha * x, in place.
void axpy(real alpha, const DenseMatrix& x, DenseMatrix& y);
DenseMatrix scale(const DenseMatrix& a, real alpha);

DenseMatrix relu(const DenseMatrix& a);
/// grad ⊙ [preact > 0]
DenseMatrix relu_backward(const DenseMatrix& grad, const DenseMatrix& preact);

/// Row-wise softmax with max-subtraction for stability. Scalar reduction so
/// results are backend-independent.
DenseMatrix softmax_rows(const DenseMatrix& a);

/// 1 x cols matrix of column sums. Scalar reduction.
DenseMatrix colsum(const DenseMatrix& a);

/// Sum of elementwise products (Frobenius inner product). Scalar reduction.
real dot_all(const DenseMatrix& a, const DenseMatrix& b);

/// Squared Frobenius norm.
real frobenius_sq(const DenseMatrix& a);

/// Scale each row to sum 1. Rows whose sum is zero are left untouched.
SparseMatrixCSR row_normalize_sparse(const SparseMatrixCSR& s);

}  // namespace crossgcn::ops
