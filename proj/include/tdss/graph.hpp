#pragma once

#include "tdss/types.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tdss {

// Undirected, unweighted, simple graph stored as a binary symmetric CSR
// matrix with zero diagonal. Column indices are sorted within each row, so
// neighbor lists can be intersected and binary-searched directly.
struct Graph {
    Index num_nodes = 0;
    SparseMatrix adjacency;        // num_nodes x num_nodes, entries are 1.0
    std::vector<Index> degrees;    // degrees[i] == nnz of row i

    // Builds from unique undirected edges (u < v). Throws DataError on
    // self-loops, duplicates, or out-of-range endpoints.
    static Graph from_edges(Index num_nodes,
                            std::span<const std::pair<Index, Index>> edges);

    std::span<const Index> neighbors(Index v) const;
    bool has_edge(Index u, Index v) const;
    Index num_edges() const { return static_cast<Index>(adjacency.nonZeros() / 2); }
};

// A graph with node features, optional labels and a class count. Labels use
// -1 for unlabeled nodes; labeled entries lie in [0, num_classes).
struct GraphBundle {
    Graph graph;
    SparseMatrix features;                       // num_nodes x feature_dim
    std::optional<std::vector<Index>> labels;
    Index num_classes = 0;
    std::string name;

    Index num_nodes() const { return graph.num_nodes; }
    Index feature_dim() const { return static_cast<Index>(features.cols()); }
};

// Throws DataError if any structural invariant is violated (asymmetry,
// diagonal entries, degree mismatch, label range, shape mismatch).
void validate_bundle(const GraphBundle& bundle);

struct MotifCensus {
    std::uint64_t triangles = 0;
    std::array<std::uint64_t, 4> stars{};  // stars[i] = #stars with k = i+3 leaves
};

// Exact counts. Triangles by sorted-neighbor intersection; star_k as
// sum over nodes of C(degree, k) for k in 3..6.
MotifCensus motif_census(const Graph& g);

// D^{-1/2} (A + I?) D^{-1/2} with D the degree matrix of the (possibly
// self-looped) graph. Rows/columns of isolated nodes are zero unless
// self-loops are added.
SparseMatrix normalized_adjacency(const Graph& g, bool add_self_loops);

struct BundleStats {
    Index num_nodes = 0;
    Index num_edges = 0;
    Index feature_dim = 0;
    std::int64_t feature_nnz = 0;
    Index num_labeled = 0;
    Index num_classes = 0;
    // The density convention used by dataset tables is often unstated, so
    // both common normalizations are reported.
    Scalar density_n2 = 0;     // 2E / n^2
    Scalar density_pairs = 0;  // 2E / (n (n-1))
};

BundleStats bundle_stats(const GraphBundle& bundle);

}  // namespace tdss
