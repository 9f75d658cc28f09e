#pragma once

#include "tdss/sampling.hpp"
#include "tdss/types.hpp"

namespace tdss {

struct SmoothingResult {
    Scalar value = 0;     // always >= 0
    DenseMatrix grad_h;   // same shape as h; zero rows for degree-0 nodes
};

// Laplacian smoothing penalty over the sampled adjacency:
//
//   1/2 sum_ij  A~_ij || h_i / sqrt(d_i) - h_j / sqrt(d_j) ||^2
//
// with d the degrees of A~ itself (the graph actually inducing the penalty).
// Degree-0 nodes have no incident terms and receive zero gradient. The
// returned gradient is the exact analytic derivative with respect to h.
SmoothingResult laplacian_smoothing(const DenseMatrix& h, const SampledAdjacency& sa);

}  // namespace tdss
