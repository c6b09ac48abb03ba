#include "crossgcn/dense.hpp"

#include <algorithm>
#include <cmath>

namespace crossgcn {

DenseMatrix::DenseMatrix(index_t rows, index_t cols)
    : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows * cols), 0.0) {
    if (rows < 0 || cols < 0) throw ShapeError("negative matrix dimension");
}

DenseMatrix::DenseMatrix(index_t rows, index_t cols, std::vector<real> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (static_cast<size_t>(rows * cols) != data_.size())
        throw ShapeError("data length " + std::to_string(data_.size()) +
                         " does not match " + std::to_string(rows) + "x" +
                         std::to_string(cols));
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<real>> rows) {
    rows_ = static_cast<index_t>(rows.size());
    cols_ = rows_ > 0 ? static_cast<index_t>(rows.begin()->size()) : 0;
    data_.reserve(static_cast<size_t>(rows_ * cols_));
    for (const auto& r : rows) {
        if (static_cast<index_t>(r.size()) != cols_)
            throw ShapeError("ragged initializer list");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

DenseMatrix DenseMatrix::ones(index_t rows, index_t cols) {
    DenseMatrix m(rows, cols);
    m.fill(1.0);
    return m;
}

DenseMatrix DenseMatrix::identity(index_t n) {
    DenseMatrix m(n, n);
    for (index_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

void DenseMatrix::fill(real v) { std::fill(data_.begin(), data_.end(), v); }

bool DenseMatrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](real v) { return std::isfinite(v); });
}

std::string shape_str(const DenseMatrix& m) {
    return "(" + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ")";
}

}  // namespace crossgcn
