#pragma once

#include "tdss/types.hpp"

#include <algorithm>
#include <cmath>

namespace tdss {

// Dense kernels are thin shape-checked layers over Eigen expressions. They
// accept any dense expression and evaluate to a concrete DenseMatrix, so
// callers can pass blocks, transposes and products without materializing.

template <typename DerivedA, typename DerivedB>
DenseMatrix matmul(const Eigen::MatrixBase<DerivedA>& a,
                   const Eigen::MatrixBase<DerivedB>& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: incompatible shapes " +
                         shape_str(a.rows(), a.cols()) + " x " +
                         shape_str(b.rows(), b.cols()));
    }
    return a.derived() * b.derived();
}

template <typename Derived>
DenseMatrix spmm(const SparseMatrix& s, const Eigen::MatrixBase<Derived>& d) {
    if (s.cols() != d.rows()) {
        throw ShapeError("spmm: incompatible shapes " +
                         shape_str(s.rows(), s.cols()) + " x " +
                         shape_str(d.rows(), d.cols()));
    }
    return s * d.derived();
}

// Row-wise softmax with max-subtraction; rows sum to 1 regardless of the
// magnitude of the inputs.
template <typename Derived>
DenseMatrix row_softmax(const Eigen::MatrixBase<Derived>& m) {
    DenseMatrix out = m.derived();
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        const Scalar row_max = out.row(i).maxCoeff();
        out.row(i) = (out.row(i).array() - row_max).exp();
        out.row(i) /= out.row(i).sum();
    }
    return out;
}

// log(exp(a) + exp(b)) without overflow.
inline Scalar log_sum_exp(Scalar a, Scalar b) {
    const Scalar hi = std::max(a, b);
    const Scalar lo = std::min(a, b);
    if (std::isinf(hi) && hi < 0) return hi;  // both -inf
    return hi + std::log1p(std::exp(lo - hi));
}

inline DenseMatrix densify(const SparseMatrix& s) { return DenseMatrix(s); }

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
    if (!m.allFinite()) {
        throw NumericError(std::string(what) + ": non-finite values");
    }
}

}  // namespace tdss
