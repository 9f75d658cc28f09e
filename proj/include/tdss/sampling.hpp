#pragma once

#include "tdss/graph.hpp"
#include "tdss/rng.hpp"

#include <cstdint>
#include <vector>

namespace tdss {

enum class SamplerMode { khop, rw };

struct SamplerConfig {
    SamplerMode mode = SamplerMode::rw;
    Index k = 1;            // hop radius (khop mode)
    Index walk_length = 2;  // steps per walk (rw mode)
    Index num_walks = 3;    // walks per node (rw mode)
    std::uint64_t seed = 0;
};

void validate(const SamplerConfig& cfg);

// The original adjacency pruned to edges incident to sampled neighbors,
// symmetrized by union. Always a subgraph of the input adjacency.
struct SampledAdjacency {
    SparseMatrix matrix;               // binary, symmetric, zero diagonal
    std::vector<Index> degrees_tilde;  // row nnz of matrix
    Scalar rho = 0;                    // nnz / num_nodes: mean sampled neighbors
};

// Nodes u != v with shortest-path distance(v, u) <= k, sorted ascending.
std::vector<Index> khop_neighbors(const Graph& g, Index v, Index k);

// Union of nodes visited by num_walks independent random walks of
// walk_length steps starting at v, excluding v itself, sorted ascending.
// Each step moves to a uniformly random neighbor; a walk that reaches an
// isolated node stops early. Consumes exactly one next_below() per step.
std::vector<Index> rw_neighbors(const Graph& g, Index v, Index walk_length,
                                Index num_walks, SplitMix64& rng);

// Per-node RNG substream for random-walk sampling. Documented so that
// independent re-simulations can reproduce the exact walk sequences.
inline SplitMix64 walk_rng(std::uint64_t seed, Index node) {
    return SplitMix64(derive_seed(seed, "rw-node", static_cast<std::uint64_t>(node)));
}

SampledAdjacency build_sampled_adjacency(const Graph& g, const SamplerConfig& cfg);

}  // namespace tdss
