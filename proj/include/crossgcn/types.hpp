#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace crossgcn {

// 64-bit floats everywhere: gradient checks and bit-reproducible experiment
// summaries both depend on it.
using real = double;
using index_t = std::int64_t;

/// Dimension mismatch between operands; message carries both shapes.
class ShapeError : public std::runtime_error {
public:
    explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent input data (files, configs, labels).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite values where finiteness is an invariant (NaN loss, NaN grads).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace crossgcn
