#include "crossgcn/ops.hpp"

#include <algorithm>
#include <cmath>

#include "crossgcn/kernels.hpp"

namespace crossgcn::ops {

namespace {

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* op) {
  if (!a.same_shape(b))
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a) + " vs " + shape_str(b));
}

}  // namespace

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows())
    throw ShapeError("matmul: inner dimensions differ, " + shape_str(a) + " * " + shape_str(b));
  DenseMatrix c(a.rows(), b.cols());
  kernels::matmul(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.cols());
  return c;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols(), a.rows());
  for (index_t i = 0; i < a.rows(); ++i)
    for (index_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
  return matmul(a, transpose(b));
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  return matmul(transpose(a), b);
}

DenseMatrix spmm(const SparseMatrixCSR& s, const DenseMatrix& d) {
  if (s.cols() != d.rows())
    throw ShapeError("spmm: inner dimensions differ, [" + std::to_string(s.rows()) + " x " +
                     std::to_string(s.cols()) + "] * " + shape_str(d));
  DenseMatrix c(s.rows(), d.cols());
  kernels::spmm(s.rows(), s.indptr().data(), s.indices().data(), s.values().data(), d.data(),
                c.data(), d.cols());
  return c;
}

DenseMatrix spmm_tn(const SparseMatrixCSR& s, const DenseMatrix& d) {
  if (s.rows() != d.rows())
    throw ShapeError("spmm_tn: inner dimensions differ, [" + std::to_string(s.cols()) + " x " +
                     std::to_string(s.rows()) + "] * " + shape_str(d));
  DenseMatrix c(s.cols(), d.cols());
  kernels::spmm_tn(s.rows(), s.cols(), s.indptr().data(), s.indices().data(), s.values().data(),
                   d.data(), c.data(), d.cols());
  return c;
}

DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "hadamard");
  DenseMatrix c(a.rows(), a.cols());
  kernels::hadamard(a.data(), b.data(), c.data(), a.size());
  return c;
}

void hadamard_acc(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& c) {
  require_same_shape(a, b, "hadamard_acc");
  require_same_shape(a, c, "hadamard_acc");
  kernels::hadamard_acc(a.data(), b.data(), c.data(), a.size());
}

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "add");
  DenseMatrix c(a.rows(), a.cols());
  kernels::add(a.data(), b.data(), c.data(), a.size());
  return c;
}

DenseMatrix sub(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "sub");
  DenseMatrix c(a.rows(), a.cols());
  const real* pa = a.data();
  const real* pb = b.data();
  real* pc = c.data();
  for (index_t i = 0; i < a.size(); ++i) pc[i] = pa[i] - pb[i];
  return c;
}

void axpy(real alpha, const DenseMatrix& x, DenseMatrix& y) {
  require_same_shape(x, y, "axpy");
  kernels::axpy(alpha, x.data(), y.data(), x.size());
}

DenseMatrix scale(const DenseMatrix& a, real alpha) {
  DenseMatrix c(a.rows(), a.cols());
  kernels::scale(a.data(), alpha, c.data(), a.size());
  return c;
}

DenseMatrix relu(const DenseMatrix& a) {
  DenseMatrix c(a.rows(), a.cols());
  const real* pa = a.data();
  real* pc = c.data();
  for (index_t i = 0; i < a.size(); ++i) pc[i] = pa[i] > 0 ? pa[i] : real(0);
  return c;
}

DenseMatrix relu_backward(const DenseMatrix& grad, const DenseMatrix& preact) {
  require_same_shape(grad, preact, "relu_backward");
  DenseMatrix c(grad.rows(), grad.cols());
  const real* pg = grad.data();
  const real* pz = preact.data();
  real* pc = c.data();
  for (index_t i = 0; i < grad.size(); ++i) pc[i] = pz[i] > 0 ? pg[i] : real(0);
  return c;
}

DenseMatrix softmax_rows(const DenseMatrix& a) {
  DenseMatrix p(a.rows(), a.cols());
  for (index_t i = 0; i < a.rows(); ++i) {
    const real* arow = a.data() + i * a.cols();
    real* prow = p.data() + i * a.cols();
    real mx = arow[0];
    for (index_t j = 1; j < a.cols(); ++j) mx = std::max(mx, arow[j]);
    real sum = 0;
    for (index_t j = 0; j < a.cols(); ++j) {
      prow[j] = std::exp(arow[j] - mx);
      sum += prow[j];
    }
    for (index_t j = 0; j < a.cols(); ++j) prow[j] /= sum;
  }
  return p;
}

DenseMatrix colsum(const DenseMatrix& a) {
  DenseMatrix s(1, a.cols());
  for (index_t i = 0; i < a.rows(); ++i) {
    const real* arow = a.data() + i * a.cols();
    for (index_t j = 0; j < a.cols(); ++j) s(0, j) += arow[j];
  }
  return s;
}

real dot_all(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "dot_all");
  const real* pa = a.data();
  const real* pb = b.data();
  real acc = 0;
  for (index_t i = 0; i < a.size(); ++i) acc += pa[i] * pb[i];
  return acc;
}

real frobenius_sq(const DenseMatrix& a) {
  const real* pa = a.data();
  real acc = 0;
  for (index_t i = 0; i < a.size(); ++i) acc += pa[i] * pa[i];
  return acc;
}

SparseMatrixCSR row_normalize_sparse(const SparseMatrixCSR& s) {
  std::vector<real> vals = s.values();
  for (index_t i = 0; i < s.rows(); ++i) {
    real rowsum = 0;
    for (index_t p = s.indptr()[i]; p < s.indptr()[i + 1]; ++p) rowsum += vals[p];
    if (rowsum != 0)
      for (index_t p = s.indptr()[i]; p < s.indptr()[i + 1]; ++p) vals[p] /= rowsum;
  }
  return SparseMatrixCSR(s.rows(), s.cols(), s.indptr(), s.indices(), std::move(vals));
}

}  // namespace crossgcn::ops
