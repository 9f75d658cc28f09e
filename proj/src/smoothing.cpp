#include "tdss/smoothing.hpp"

#include <cmath>

namespace tdss {

SmoothingResult laplacian_smoothing(const DenseMatrix& h, const SampledAdjacency& sa) {
    const Index n = static_cast<Index>(sa.matrix.rows());
    if (h.rows() != n) {
        throw ShapeError("laplacian_smoothing: h has " + std::to_string(h.rows()) +
                         " rows, sampled adjacency has " + std::to_string(n));
    }

    Vector inv_sqrt(n);
    for (Index i = 0; i < n; ++i) {
        const Index d = sa.degrees_tilde[i];
        inv_sqrt[i] = d > 0 ? 1.0 / std::sqrt(static_cast<Scalar>(d)) : 0.0;
    }

    // u_i = h_i / sqrt(d_i); every edge endpoint has d >= 1 by construction,
    // degree-0 nodes simply have no incident terms.
    DenseMatrix u = inv_sqrt.asDiagonal() * h;

    SmoothingResult result;
    result.grad_h = DenseMatrix::Zero(h.rows(), h.cols());

    for (Index i = 0; i < n; ++i) {
        if (sa.degrees_tilde[i] == 0) continue;
        RowVector acc = RowVector::Zero(h.cols());
        for (SparseMatrix::InnerIterator it(sa.matrix, i); it; ++it) {
            const Index j = static_cast<Index>(it.col());
            acc += u.row(j);
            if (j > i) {
                result.value += (u.row(i) - u.row(j)).squaredNorm();
            }
        }
        // dL/dh_i = 2/sqrt(d_i) * (d_i u_i - sum_{j ~ i} u_j)
        result.grad_h.row(i) =
            2.0 * inv_sqrt[i] *
            (static_cast<Scalar>(sa.degrees_tilde[i]) * u.row(i) - acc);
    }
    return result;
}

}  // namespace tdss
