#include "tdss/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tdss {

Graph Graph::from_edges(Index num_nodes,
                        std::span<const std::pair<Index, Index>> edges) {
    if (num_nodes < 0) throw DataError("graph: negative node count");

    std::vector<std::pair<Index, Index>> canon;
    canon.reserve(edges.size());
    for (const auto& [u, v] : edges) {
        if (u < 0 || v < 0 || u >= num_nodes || v >= num_nodes) {
            throw DataError("graph: edge endpoint out of range: " +
                            std::to_string(u) + "-" + std::to_string(v));
        }
        if (u == v) {
            throw DataError("graph: self-loop at node " + std::to_string(u));
        }
        canon.emplace_back(std::min(u, v), std::max(u, v));
    }
    std::sort(canon.begin(), canon.end());
    if (std::adjacent_find(canon.begin(), canon.end()) != canon.end()) {
        const auto it = std::adjacent_find(canon.begin(), canon.end());
        throw DataError("graph: duplicate edge " + std::to_string(it->first) +
                        "-" + std::to_string(it->second));
    }

    std::vector<Eigen::Triplet<Scalar, Index>> triplets;
    triplets.reserve(canon.size() * 2);
    for (const auto& [u, v] : canon) {
        triplets.emplace_back(u, v, 1.0);
        triplets.emplace_back(v, u, 1.0);
    }

    Graph g;
    g.num_nodes = num_nodes;
    g.adjacency.resize(num_nodes, num_nodes);
    g.adjacency.setFromTriplets(triplets.begin(), triplets.end());
    g.adjacency.makeCompressed();
    g.degrees.resize(num_nodes);
    for (Index i = 0; i < num_nodes; ++i) {
        g.degrees[i] = static_cast<Index>(g.adjacency.outerIndexPtr()[i + 1] -
                                          g.adjacency.outerIndexPtr()[i]);
    }
    return g;
}

std::span<const Index> Graph::neighbors(Index v) const {
    const Index* base = adjacency.innerIndexPtr();
    const auto* outer = adjacency.outerIndexPtr();
    return {base + outer[v], static_cast<std::size_t>(outer[v + 1] - outer[v])};
}

bool Graph::has_edge(Index u, Index v) const {
    const auto nbrs = neighbors(u);
    return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

void validate_bundle(const GraphBundle& bundle) {
    const Graph& g = bundle.graph;
    const Index n = g.num_nodes;
    if (g.adjacency.rows() != n || g.adjacency.cols() != n) {
        throw DataError("bundle '" + bundle.name + "': adjacency shape mismatch");
    }
    if (static_cast<Index>(g.degrees.size()) != n) {
        throw DataError("bundle '" + bundle.name + "': degree vector length mismatch");
    }
    for (Index i = 0; i < n; ++i) {
        const auto nbrs = g.neighbors(i);
        if (static_cast<Index>(nbrs.size()) != g.degrees[i]) {
            throw DataError("bundle '" + bundle.name + "': degree mismatch at node " +
                            std::to_string(i));
        }
        for (const Index j : nbrs) {
            if (j == i) {
                throw DataError("bundle '" + bundle.name + "': self-loop at node " +
                                std::to_string(i));
            }
            if (!g.has_edge(j, i)) {
                throw DataError("bundle '" + bundle.name + "': asymmetric edge " +
                                std::to_string(i) + "-" + std::to_string(j));
            }
        }
    }
    if (bundle.features.rows() != n) {
        throw DataError("bundle '" + bundle.name + "': feature rows (" +
                        std::to_string(bundle.features.rows()) +
                        ") != num_nodes (" + std::to_string(n) + ")");
    }
    if (bundle.num_classes < 0) {
        throw DataError("bundle '" + bundle.name + "': negative class count");
    }
    if (bundle.labels) {
        if (static_cast<Index>(bundle.labels->size()) != n) {
            throw DataError("bundle '" + bundle.name + "': label array length mismatch");
        }
        for (Index i = 0; i < n; ++i) {
            const Index y = (*bundle.labels)[i];
            if (y < -1 || y >= bundle.num_classes) {
                throw DataError("bundle '" + bundle.name + "': label " +
                                std::to_string(y) + " out of range at node " +
                                std::to_string(i));
            }
        }
    }
}

namespace {

std::uint64_t binomial_clamped(Index n, int k) {
    if (k < 0 || n < k) return 0;
    unsigned __int128 acc = 1;
    for (int i = 1; i <= k; ++i) {
        acc = acc * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
        if (acc > std::numeric_limits<std::uint64_t>::max()) {
            return std::numeric_limits<std::uint64_t>::max();
        }
    }
    return static_cast<std::uint64_t>(acc);
}

}  // namespace

MotifCensus motif_census(const Graph& g) {
    MotifCensus census;
    // Each triangle u < v < w is counted exactly once: at edge (u, v) with w
    // ranging over common neighbors greater than v.
    for (Index u = 0; u < g.num_nodes; ++u) {
        const auto nu = g.neighbors(u);
        for (const Index v : nu) {
            if (v <= u) continue;
            const auto nv = g.neighbors(v);
            auto a = nu.begin();
            auto b = nv.begin();
            while (a != nu.end() && b != nv.end()) {
                if (*a < *b) {
                    ++a;
                } else if (*b < *a) {
                    ++b;
                } else {
                    if (*a > v) ++census.triangles;
                    ++a;
                    ++b;
                }
            }
        }
    }
    for (Index v = 0; v < g.num_nodes; ++v) {
        for (int k = 3; k <= 6; ++k) {
            census.stars[k - 3] += binomial_clamped(g.degrees[v], k);
        }
    }
    return census;
}

SparseMatrix normalized_adjacency(const Graph& g, bool add_self_loops) {
    const Index n = g.num_nodes;
    Vector inv_sqrt(n);
    for (Index i = 0; i < n; ++i) {
        const Scalar d = g.degrees[i] + (add_self_loops ? 1.0 : 0.0);
        inv_sqrt[i] = d > 0 ? 1.0 / std::sqrt(d) : 0.0;
    }

    std::vector<Eigen::Triplet<Scalar, Index>> triplets;
    triplets.reserve(g.adjacency.nonZeros() + (add_self_loops ? n : 0));
    for (Index i = 0; i < n; ++i) {
        if (add_self_loops) {
            triplets.emplace_back(i, i, inv_sqrt[i] * inv_sqrt[i]);
        }
        for (const Index j : g.neighbors(i)) {
            triplets.emplace_back(i, j, inv_sqrt[i] * inv_sqrt[j]);
        }
    }

    SparseMatrix shat(n, n);
    shat.setFromTriplets(triplets.begin(), triplets.end());
    shat.makeCompressed();
    return shat;
}

BundleStats bundle_stats(const GraphBundle& bundle) {
    BundleStats s;
    s.num_nodes = bundle.num_nodes();
    s.num_edges = bundle.graph.num_edges();
    s.feature_dim = bundle.feature_dim();
    s.feature_nnz = static_cast<std::int64_t>(bundle.features.nonZeros());
    s.num_classes = bundle.num_classes;
    if (bundle.labels) {
        for (const Index y : *bundle.labels) {
            if (y >= 0) ++s.num_labeled;
        }
    }
    const Scalar n = static_cast<Scalar>(s.num_nodes);
    const Scalar e2 = 2.0 * static_cast<Scalar>(s.num_edges);
    s.density_n2 = n > 0 ? e2 / (n * n) : 0.0;
    s.density_pairs = n > 1 ? e2 / (n * (n - 1)) : 0.0;
    return s;
}

}  // namespace tdss
