#include "tdss/sampling.hpp"

#include <algorithm>

namespace tdss {

void validate(const SamplerConfig& cfg) {
    if (cfg.mode == SamplerMode::khop) {
        if (cfg.k < 1) throw ConfigError("sampler: k must be >= 1 in khop mode");
    } else {
        if (cfg.walk_length < 1) throw ConfigError("sampler: walk_length must be >= 1");
        if (cfg.num_walks < 1) throw ConfigError("sampler: num_walks must be >= 1");
    }
}

namespace {

void check_node(const Graph& g, Index v) {
    if (v < 0 || v >= g.num_nodes) {
        throw DataError("sampler: node " + std::to_string(v) + " out of range [0, " +
                        std::to_string(g.num_nodes) + ")");
    }
}

// BFS truncated at depth k, reusing caller-owned scratch so per-node calls
// stay O(reached), not O(n). stamp[u] == v marks u visited for source v.
void khop_into(const Graph& g, Index v, Index k, std::vector<Index>& stamp,
               std::vector<Index>& queue, std::vector<Index>& out) {
    out.clear();
    queue.clear();
    queue.push_back(v);
    stamp[v] = v;
    std::size_t head = 0;
    Index frontier_end = 1;  // queue size where the current depth ends
    Index depth = 0;
    while (head < queue.size() && depth < k) {
        ++depth;
        const std::size_t level_end = frontier_end;
        while (head < level_end) {
            const Index cur = queue[head++];
            for (const Index nb : g.neighbors(cur)) {
                if (stamp[nb] == v) continue;
                stamp[nb] = v;
                queue.push_back(nb);
                out.push_back(nb);
            }
        }
        frontier_end = static_cast<Index>(queue.size());
    }
    std::sort(out.begin(), out.end());
}

}  // namespace

std::vector<Index> khop_neighbors(const Graph& g, Index v, Index k) {
    check_node(g, v);
    if (k < 1) throw ConfigError("khop_neighbors: k must be >= 1");
    std::vector<Index> stamp(g.num_nodes, -1);
    std::vector<Index> queue;
    std::vector<Index> out;
    khop_into(g, v, k, stamp, queue, out);
    return out;
}

std::vector<Index> rw_neighbors(const Graph& g, Index v, Index walk_length,
                                Index num_walks, SplitMix64& rng) {
    check_node(g, v);
    std::vector<Index> visited;
    visited.reserve(static_cast<std::size_t>(walk_length) * num_walks);
    for (Index w = 0; w < num_walks; ++w) {
        Index cur = v;
        for (Index step = 0; step < walk_length; ++step) {
            const auto nbrs = g.neighbors(cur);
            if (nbrs.empty()) break;
            cur = nbrs[rng.next_below(nbrs.size())];
            if (cur != v) visited.push_back(cur);
        }
    }
    std::sort(visited.begin(), visited.end());
    visited.erase(std::unique(visited.begin(), visited.end()), visited.end());
    return visited;
}

SampledAdjacency build_sampled_adjacency(const Graph& g, const SamplerConfig& cfg) {
    validate(cfg);
    const Index n = g.num_nodes;

    // Sampled neighbor sets intersected with the original edge set give the
    // directed keep-decisions; the union with their transposes symmetrizes.
    std::vector<std::pair<Index, Index>> kept;
    if (cfg.mode == SamplerMode::khop) {
        std::vector<Index> stamp(n, -1);
        std::vector<Index> queue;
        std::vector<Index> reached;
        for (Index v = 0; v < n; ++v) {
            khop_into(g, v, cfg.k, stamp, queue, reached);
            const auto nbrs = g.neighbors(v);
            // reached and nbrs are both sorted; intersect by merge.
            auto a = reached.begin();
            auto b = nbrs.begin();
            while (a != reached.end() && b != nbrs.end()) {
                if (*a < *b) {
                    ++a;
                } else if (*b < *a) {
                    ++b;
                } else {
                    kept.emplace_back(std::min(v, *a), std::max(v, *a));
                    ++a;
                    ++b;
                }
            }
        }
    } else {
        for (Index v = 0; v < n; ++v) {
            SplitMix64 rng = walk_rng(cfg.seed, v);
            const auto visited = rw_neighbors(g, v, cfg.walk_length, cfg.num_walks, rng);
            for (const Index u : visited) {
                if (g.has_edge(v, u)) {
                    kept.emplace_back(std::min(v, u), std::max(v, u));
                }
            }
        }
    }

    std::sort(kept.begin(), kept.end());
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());

    std::vector<Eigen::Triplet<Scalar, Index>> triplets;
    triplets.reserve(kept.size() * 2);
    for (const auto& [u, v] : kept) {
        triplets.emplace_back(u, v, 1.0);
        triplets.emplace_back(v, u, 1.0);
    }

    SampledAdjacency sa;
    sa.matrix.resize(n, n);
    sa.matrix.setFromTriplets(triplets.begin(), triplets.end());
    sa.matrix.makeCompressed();
    sa.degrees_tilde.resize(n);
    for (Index i = 0; i < n; ++i) {
        sa.degrees_tilde[i] = static_cast<Index>(sa.matrix.outerIndexPtr()[i + 1] -
                                                 sa.matrix.outerIndexPtr()[i]);
    }
    sa.rho = n > 0 ? static_cast<Scalar>(sa.matrix.nonZeros()) / static_cast<Scalar>(n) : 0.0;
    return sa;
}

}  // namespace tdss
