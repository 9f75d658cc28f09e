#pragma once

#include "tdss/graph.hpp"
#include "tdss/types.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace tdss {

enum class BandwidthMode { median_heuristic, fixed };

struct KernelConfig {
    BandwidthMode mode = BandwidthMode::median_heuristic;
    Scalar sigma = 1.0;  // used in fixed mode; must be > 0
};

struct MmdResult {
    Scalar value = 0;      // biased V-statistic, >= -1e-12 up to rounding
    Scalar sigma = 0;      // bandwidth actually used
    DenseMatrix grad_hs;
    DenseMatrix grad_ht;
};

// Squared maximum mean discrepancy between the rows of hs and ht under a
// Gaussian kernel k(x,y) = exp(-||x-y||^2 / (2 sigma^2)):
//
//   mean(K_ss) + mean(K_tt) - 2 mean(K_st)
//
// Gradients are taken with the bandwidth held constant, also in
// median-heuristic mode.
MmdResult mmd2(const DenseMatrix& hs, const DenseMatrix& ht, const KernelConfig& cfg);

// Median of pairwise Euclidean distances over the pooled rows, floored at
// 1e-6. Pools larger than 2048 rows are subsampled with a fixed seed.
Scalar median_heuristic(const DenseMatrix& hs, const DenseMatrix& ht);

struct DiscreteDistribution {
    std::vector<Scalar> probs;  // nonnegative, sums to 1 within 1e-9
};

void validate(const DiscreteDistribution& d);

// Total variation distance (1/2) sum_v |p_v - q_v|, in [0, 1]. Used only as
// a diagnostic; training alignment goes through mmd2.
Scalar tvd(const DiscreteDistribution& p, const DiscreteDistribution& q);

// Empirical model-smoothness estimate: the mean over nodes i of the largest
// ||h_i - h_j||_inf over nodes j within graph distance k of i whose features
// satisfy ||x_i - x_j||_inf <= r. An empty neighbor set contributes 0.
// Smaller values mean a smoother model on this graph.
Scalar estimate_smoothness(const DenseMatrix& h, const Graph& g,
                           const SparseMatrix& features, Index k, Scalar r);

struct BoundInputs {
    Scalar gamma = 1;    // feature-diameter bound, > 0
    Scalar upsilon = 1;  // loss bound, > 0
    Scalar phi_s = 0;    // smoothness estimate, source
    Scalar phi_t = 0;    // smoothness estimate, target
    Scalar mmd = 0;      // raw squared-MMD diagnostic
    Scalar tvd = 0;      // raw TVD diagnostic
    Scalar xi = 0.05;    // confidence parameter, in (0, 1)
    Scalar r = 0.5;      // cover radius, > 0
    Index k = 2;         // cover hop radius
    std::int64_t m = 1;  // source node count
    std::int64_t n = 1;  // target node count
    std::int64_t d = 1;  // feature dimension
};

// Risk-bound diagnostic terms. The dominant factor (2d)^(2 Phi^2 Gamma / r^2 + 1)
// overflows doubles for realistic dimensions, so Z and the K summands are
// computed and reported in the log domain:
//
//   log Z   = 1/2 log( (2d)^(2 Phi^2 Gamma / r^2 + 1) log 2 + 2 log(1/xi) )
//   K terms = { Upsilon Z / sqrt(m),  Upsilon Z / sqrt(n),
//               Upsilon sqrt(log(1/xi) / (2m)) }
//
// Phi is taken as max(phi_s, phi_t): the cover has to hold over both
// domains. The kernel constant relating MMD to TVD is not computable, so the
// two discrepancies are reported side by side and never combined.
struct BoundDiagnostics {
    BoundInputs inputs;
    Scalar phi = 0;                    // max(phi_s, phi_t), used in Z
    Scalar log_z = 0;
    std::array<Scalar, 3> log_k_terms{};
    Scalar log_k_total = 0;            // log(K1 + K2 + K3)
};

BoundDiagnostics bound_terms(const BoundInputs& in);

}  // namespace tdss
