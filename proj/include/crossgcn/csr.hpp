#pragma once

#include "crossgcn/dense.hpp"
#include "crossgcn/types.hpp"

#include <tuple>
#include <vector>

namespace crossgcn {

/// Compressed sparse row matrix. Invariants (enforced by validate()):
/// indptr[0] == 0, indptr non-decreasing, indptr[rows] == nnz, column
/// indices strictly increasing within each row and < cols, no stored zeros.
class SparseMatrixCSR {
public:
    SparseMatrixCSR() = default;
    SparseMatrixCSR(index_t rows, index_t cols, std::vector<index_t> indptr,
                    std::vector<index_t> indices, std::vector<real> values);

    /// Builds from (row, col, value) triplets. Triplets may arrive unsorted;
    /// duplicates are summed and entries that cancel to zero are dropped.
    static SparseMatrixCSR from_coo(index_t rows, index_t cols,
                                    std::vector<std::tuple<index_t, index_t, real>> coo);

    static SparseMatrixCSR identity(index_t n);

    index_t rows() const { return rows_; }
    index_t cols() const { return cols_; }
    index_t nnz() const { return static_cast<index_t>(values_.size()); }

    const std::vector<index_t>& indptr() const { return indptr_; }
    const std::vector<index_t>& indices() const { return indices_; }
    const std::vector<real>& values() const { return values_; }
    std::vector<real>& values() { return values_; }

    /// Throws DataError on any broken CSR invariant.
    void validate() const;

    DenseMatrix to_dense() const;
    SparseMatrixCSR transposed() const;
    bool is_symmetric(real tol = 0.0) const;

    bool operator==(const SparseMatrixCSR& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && indptr_ == o.indptr_ &&
               indices_ == o.indices_ && values_ == o.values_;
    }

private:
    index_t rows_ = 0;
    index_t cols_ = 0;
    std::vector<index_t> indptr_{0};
    std::vector<index_t> indices_;
    std::vector<real> values_;
};

}  // namespace crossgcn
