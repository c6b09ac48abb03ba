#pragma once

#include "crossgcn/types.hpp"

#include <initializer_list>
#include <vector>

namespace crossgcn {

/// Row-major dense matrix of doubles. Weights, activations and gradients all
/// live in this type; a vector is a 1-column or 1-row matrix as convenient.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(index_t rows, index_t cols);
    DenseMatrix(index_t rows, index_t cols, std::vector<real> data);
    DenseMatrix(std::initializer_list<std::initializer_list<real>> rows);

    static DenseMatrix zeros(index_t rows, index_t cols) { return {rows, cols}; }
    static DenseMatrix ones(index_t rows, index_t cols);
    static DenseMatrix identity(index_t n);

    index_t rows() const { return rows_; }
    index_t cols() const { return cols_; }
    index_t size() const { return rows_ * cols_; }

    real operator()(index_t i, index_t j) const { return data_[i * cols_ + j]; }
    real& operator()(index_t i, index_t j) { return data_[i * cols_ + j]; }

    const real* data() const { return data_.data(); }
    real* data() { return data_.data(); }
    const std::vector<real>& values() const { return data_; }
    std::vector<real>& values() { return data_; }

    const real* row(index_t i) const { return data_.data() + i * cols_; }
    real* row(index_t i) { return data_.data() + i * cols_; }

    bool same_shape(const DenseMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_;
    }
    bool operator==(const DenseMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

    void fill(real v);
    bool all_finite() const;

private:
    index_t rows_ = 0;
    index_t cols_ = 0;
    std::vector<real> data_;
};

std::string shape_str(const DenseMatrix& m);

}  // namespace crossgcn
