#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <stdexcept>
#include <string>

namespace tdss {

// All numeric work is done in 64-bit floats; gradient checks at 1e-4
// relative tolerance do not hold in single precision.
using Scalar = double;
using Index = int;

using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

// CSR with sorted column indices within each row.
using SparseMatrix = Eigen::SparseMatrix<Scalar, Eigen::RowMajor, Index>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad or inconsistent configuration (CLI exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Missing or malformed input data (CLI exit code 3).
class DataError : public Error {
public:
    using Error::Error;
};

// Operand shapes incompatible with the requested operation.
class ShapeError : public DataError {
public:
    using DataError::DataError;
};

// Non-finite values or other numeric breakdown (CLI exit code 4).
class NumericError : public Error {
public:
    using Error::Error;
};

inline std::string shape_str(Eigen::Index rows, Eigen::Index cols) {
    return std::to_string(rows) + "x" + std::to_string(cols);
}

}  // namespace tdss
