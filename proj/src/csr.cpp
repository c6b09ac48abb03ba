#include "crossgcn/csr.hpp"

#include <algorithm>
#include <cmath>

namespace crossgcn {

SparseMatrixCSR::SparseMatrixCSR(index_t rows, index_t cols,
                                 std::vector<index_t> indptr,
                                 std::vector<index_t> indices,
                                 std::vector<real> values)
    : rows_(rows),
      cols_(cols),
      indptr_(std::move(indptr)),
      indices_(std::move(indices)),
      values_(std::move(values)) {
    validate();
}

SparseMatrixCSR SparseMatrixCSR::from_coo(
    index_t rows, index_t cols,
    std::vector<std::tuple<index_t, index_t, real>> coo) {
    for (const auto& [r, c, v] : coo) {
        (void)v;
        if (r < 0 || r >= rows || c < 0 || c >= cols)
            throw DataError("coo entry (" + std::to_string(r) + "," +
                            std::to_string(c) + ") outside " +
                            std::to_string(rows) + "x" + std::to_string(cols));
    }
    std::sort(coo.begin(), coo.end(), [](const auto& a, const auto& b) {
        return std::tie(std::get<0>(a), std::get<1>(a)) <
               std::tie(std::get<0>(b), std::get<1>(b));
    });

    SparseMatrixCSR m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.indptr_.assign(static_cast<size_t>(rows) + 1, 0);
    m.indices_.reserve(coo.size());
    m.values_.reserve(coo.size());

    size_t i = 0;
    while (i < coo.size()) {
        auto [r, c, v] = coo[i];
        real sum = v;
        size_t j = i + 1;
        while (j < coo.size() && std::get<0>(coo[j]) == r && std::get<1>(coo[j]) == c) {
            sum += std::get<2>(coo[j]);
            ++j;
        }
        if (sum != 0.0) {
            m.indices_.push_back(c);
            m.values_.push_back(sum);
            m.indptr_[static_cast<size_t>(r) + 1]++;
        }
        i = j;
    }
    for (index_t r = 0; r < rows; ++r)
        m.indptr_[static_cast<size_t>(r) + 1] += m.indptr_[static_cast<size_t>(r)];
    m.validate();
    return m;
}

SparseMatrixCSR SparseMatrixCSR::identity(index_t n) {
    SparseMatrixCSR m;
    m.rows_ = m.cols_ = n;
    m.indptr_.resize(static_cast<size_t>(n) + 1);
    m.indices_.resize(static_cast<size_t>(n));
    m.values_.assign(static_cast<size_t>(n), 1.0);
    for (index_t i = 0; i <= n; ++i) m.indptr_[static_cast<size_t>(i)] = i;
    for (index_t i = 0; i < n; ++i) m.indices_[static_cast<size_t>(i)] = i;
    return m;
}

void SparseMatrixCSR::validate() const {
    if (rows_ < 0 || cols_ < 0) throw DataError("negative CSR dimension");
    if (indptr_.size() != static_cast<size_t>(rows_) + 1)
        throw DataError("indptr length != rows+1");
    if (indptr_.front() != 0) throw DataError("indptr[0] != 0");
    if (indptr_.back() != nnz()) throw DataError("indptr[rows] != nnz");
    if (indices_.size() != values_.size())
        throw DataError("indices/values length mismatch");
    for (index_t r = 0; r < rows_; ++r) {
        const index_t lo = indptr_[static_cast<size_t>(r)];
        const index_t hi = indptr_[static_cast<size_t>(r) + 1];
        if (hi < lo) throw DataError("indptr decreasing at row " + std::to_string(r));
        for (index_t k = lo; k < hi; ++k) {
            const index_t c = indices_[static_cast<size_t>(k)];
            if (c < 0 || c >= cols_)
                throw DataError("column index out of range in row " + std::to_string(r));
            if (k > lo && indices_[static_cast<size_t>(k - 1)] >= c)
                throw DataError("column indices not strictly increasing in row " +
                                std::to_string(r));
            if (values_[static_cast<size_t>(k)] == 0.0)
                throw DataError("explicit zero stored in row " + std::to_string(r));
            if (!std::isfinite(values_[static_cast<size_t>(k)]))
                throw DataError("non-finite value in row " + std::to_string(r));
        }
    }
}

DenseMatrix SparseMatrixCSR::to_dense() const {
    DenseMatrix d(rows_, cols_);
    for (index_t r = 0; r < rows_; ++r)
        for (index_t k = indptr_[static_cast<size_t>(r)];
             k < indptr_[static_cast<size_t>(r) + 1]; ++k)
            d(r, indices_[static_cast<size_t>(k)]) = values_[static_cast<size_t>(k)];
    return d;
}

SparseMatrixCSR SparseMatrixCSR::transposed() const {
    std::vector<std::tuple<index_t, index_t, real>> coo;
    coo.reserve(static_cast<size_t>(nnz()));
    for (index_t r = 0; r < rows_; ++r)
        for (index_t k = indptr_[static_cast<size_t>(r)];
             k < indptr_[static_cast<size_t>(r) + 1]; ++k)
            coo.emplace_back(indices_[static_cast<size_t>(k)], r,
                             values_[static_cast<size_t>(k)]);
    return from_coo(cols_, rows_, std::move(coo));
}

bool SparseMatrixCSR::is_symmetric(real tol) const {
    if (rows_ != cols_) return false;
    const SparseMatrixCSR t = transposed();
    if (t.indptr_ != indptr_ || t.indices_ != indices_) return false;
    for (size_t k = 0; k < values_.size(); ++k)
        if (std::abs(values_[k] - t.values_[k]) > tol) return false;
    return true;
}

}  // namespace crossgcn
