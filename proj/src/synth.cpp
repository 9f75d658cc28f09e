#include "tdss/synth.hpp"

#include "tdss/rng.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace tdss {

namespace {

void check_prob(Scalar p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw ConfigError(std::string("synth: ") + name + " must be in [0,1]");
    }
}

// Per-class feature prototype: the active dimensions and their means.
// Shared between the two domains of a pair so that the label-given-feature
// relation is identical across them.
using Prototypes = std::vector<std::vector<std::pair<Index, Scalar>>>;

Prototypes make_prototypes(Index feature_dim, Index num_classes, std::uint64_t seed) {
    SplitMix64 rng(seed);
    const Index active = std::max<Index>(2, feature_dim / 8);
    Prototypes protos(num_classes);
    std::vector<Index> dims(feature_dim);
    for (Index c = 0; c < num_classes; ++c) {
        for (Index d = 0; d < feature_dim; ++d) dims[d] = d;
        // Partial Fisher-Yates: the first `active` entries are a uniform
        // draw of distinct dimensions.
        for (Index i = 0; i < active && i < feature_dim; ++i) {
            const Index j = i + static_cast<Index>(rng.next_below(feature_dim - i));
            std::swap(dims[i], dims[j]);
        }
        auto& proto = protos[c];
        for (Index i = 0; i < active && i < feature_dim; ++i) {
            proto.emplace_back(dims[i], 0.8 + 0.8 * rng.uniform01());
        }
        std::sort(proto.begin(), proto.end());
    }
    return protos;
}

struct EdgeBuilder {
    Index n;
    std::vector<std::vector<Index>> adj;
    std::unordered_set<std::uint64_t> present;

    explicit EdgeBuilder(Index num_nodes) : n(num_nodes), adj(num_nodes) {}

    bool add(Index u, Index v) {
        if (u == v) return false;
        if (u > v) std::swap(u, v);
        const std::uint64_t key =
            static_cast<std::uint64_t>(u) * static_cast<std::uint64_t>(n) + v;
        if (!present.insert(key).second) return false;
        adj[u].push_back(v);
        adj[v].push_back(u);
        return true;
    }

    std::vector<std::pair<Index, Index>> sorted_edges() const {
        std::vector<std::pair<Index, Index>> edges;
        edges.reserve(present.size());
        for (Index u = 0; u < n; ++u) {
            for (const Index v : adj[u]) {
                if (u < v) edges.emplace_back(u, v);
            }
        }
        std::sort(edges.begin(), edges.end());
        return edges;
    }
};

// Visits each index in [0, count) independently with probability p, in
// ascending order, via geometric skips. O(p * count) expected time.
template <typename Fn>
void sample_bernoulli_indices(std::int64_t count, Scalar p, SplitMix64& rng, Fn&& fn) {
    if (p <= 0.0 || count <= 0) return;
    if (p >= 1.0) {
        for (std::int64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const Scalar log1mp = std::log1p(-p);
    std::int64_t pos = -1;
    while (true) {
        const Scalar u = rng.uniform01_open();
        const std::int64_t skip = static_cast<std::int64_t>(std::floor(std::log(u) / log1mp));
        pos += 1 + skip;
        if (pos >= count) return;
        fn(pos);
    }
}

GraphBundle generate_one(const SynthConfig& cfg, const Prototypes& protos) {
    const Index n = cfg.num_nodes;
    const Index C = cfg.num_classes;

    std::vector<Index> labels(n);
    std::vector<std::vector<Index>> by_class(C);
    for (Index i = 0; i < n; ++i) {
        labels[i] = i % C;
        by_class[labels[i]].push_back(i);
    }

    EdgeBuilder builder(n);

    // Planted-partition base: every same-class pair with prob intra, every
    // cross-class pair with prob inter.
    {
        SplitMix64 rng(derive_seed(cfg.seed, "sbm"));
        for (Index c = 0; c < C; ++c) {
            const auto& nodes = by_class[c];
            for (std::size_t a = 0; a + 1 < nodes.size(); ++a) {
                sample_bernoulli_indices(
                    static_cast<std::int64_t>(nodes.size() - a - 1),
                    cfg.intra_class_edge_prob, rng,
                    [&](std::int64_t off) { builder.add(nodes[a], nodes[a + 1 + off]); });
            }
        }
        for (Index c1 = 0; c1 < C; ++c1) {
            for (Index c2 = c1 + 1; c2 < C; ++c2) {
                const auto& left = by_class[c1];
                const auto& right = by_class[c2];
                for (const Index u : left) {
                    sample_bernoulli_indices(
                        static_cast<std::int64_t>(right.size()),
                        cfg.inter_class_edge_prob, rng,
                        [&](std::int64_t off) { builder.add(u, right[off]); });
                }
            }
        }
    }

    if (cfg.motif_bias == MotifBias::triangle && cfg.closure_prob > 0.0) {
        // Wedge closure: after the base pass, walk the edges once and close a
        // random wedge at each with probability closure_prob. New edges join
        // the adjacency immediately, so closures can cascade into cliques.
        SplitMix64 rng(derive_seed(cfg.seed, "closure"));
        const auto base_edges = builder.sorted_edges();
        for (const auto& [u, v] : base_edges) {
            if (rng.uniform01() >= cfg.closure_prob) continue;
            const Index a = rng.next_below(2) == 0 ? u : v;
            const Index b = (a == u) ? v : u;
            const auto& nbrs = builder.adj[a];
            if (nbrs.size() < 2) continue;
            const Index w = nbrs[rng.next_below(nbrs.size())];
            if (w != b) builder.add(w, b);
        }
    } else if (cfg.motif_bias == MotifBias::star && cfg.hub_fraction > 0.0) {
        // Hub wiring: a seeded subset of nodes become hubs and every other
        // node attaches to one uniformly chosen hub, independent of class.
        SplitMix64 rng(derive_seed(cfg.seed, "hubs"));
        const Index num_hubs = static_cast<Index>(
            std::ceil(cfg.hub_fraction * static_cast<Scalar>(n)));
        std::vector<Index> order(n);
        for (Index i = 0; i < n; ++i) order[i] = i;
        for (Index i = 0; i < num_hubs && i < n; ++i) {
            const Index j = i + static_cast<Index>(rng.next_below(n - i));
            std::swap(order[i], order[j]);
        }
        const std::vector<Index> hubs(order.begin(),
                                      order.begin() + std::min(num_hubs, n));
        std::vector<bool> is_hub(n, false);
        for (const Index h : hubs) is_hub[h] = true;
        if (!hubs.empty()) {
            for (Index v = 0; v < n; ++v) {
                if (is_hub[v]) continue;
                builder.add(v, hubs[rng.next_below(hubs.size())]);
            }
        }
    }

    GraphBundle bundle;
    const auto edges = builder.sorted_edges();
    bundle.graph = Graph::from_edges(n, edges);

    // Bernoulli-Gaussian features: a dimension is present with probability
    // 0.8 on the class's active dims and 0.05 elsewhere; present entries are
    // the class mean (0 off-prototype) plus Gaussian noise.
    std::vector<Eigen::Triplet<Scalar, Index>> feats;
    for (Index i = 0; i < n; ++i) {
        SplitMix64 rng(derive_seed(cfg.seed, "features", static_cast<std::uint64_t>(i)));
        const auto& proto = protos[labels[i]];
        std::size_t pi = 0;
        for (Index d = 0; d < cfg.feature_dim; ++d) {
            while (pi < proto.size() && proto[pi].first < d) ++pi;
            const bool active = pi < proto.size() && proto[pi].first == d;
            const Scalar u = rng.uniform01();
            if (u >= (active ? 0.8 : 0.05)) continue;
            Scalar value = active ? proto[pi].second : 0.0;
            if (cfg.feature_noise > 0.0) value += cfg.feature_noise * rng.normal();
            if (value != 0.0) feats.emplace_back(i, d, value);
        }
    }
    bundle.features.resize(n, cfg.feature_dim);
    bundle.features.setFromTriplets(feats.begin(), feats.end());
    bundle.features.makeCompressed();

    bundle.labels = std::move(labels);
    bundle.num_classes = C;
    bundle.name = std::string("synth-") +
                  (cfg.motif_bias == MotifBias::triangle ? "triangle" : "star") +
                  "-" + std::to_string(cfg.seed);
    return bundle;
}

}  // namespace

void validate(const SynthConfig& cfg) {
    if (cfg.num_nodes < 0) throw ConfigError("synth: negative num_nodes");
    if (cfg.feature_dim < 1) throw ConfigError("synth: feature_dim must be >= 1");
    if (cfg.num_classes < 2) throw ConfigError("synth: num_classes must be >= 2");
    check_prob(cfg.closure_prob, "closure_prob");
    check_prob(cfg.hub_fraction, "hub_fraction");
    check_prob(cfg.intra_class_edge_prob, "intra_class_edge_prob");
    check_prob(cfg.inter_class_edge_prob, "inter_class_edge_prob");
    if (cfg.feature_noise < 0.0) throw ConfigError("synth: negative feature_noise");
}

std::pair<GraphBundle, GraphBundle> generate_synthetic_pair(
    const SynthConfig& source_cfg, const SynthConfig& target_cfg) {
    validate(source_cfg);
    validate(target_cfg);
    if (source_cfg.feature_dim != target_cfg.feature_dim ||
        source_cfg.num_classes != target_cfg.num_classes) {
        throw ConfigError("synth: source and target must share feature_dim and num_classes");
    }
    const auto protos = make_prototypes(source_cfg.feature_dim, source_cfg.num_classes,
                                        derive_seed(source_cfg.seed, "class-prototypes"));
    return {generate_one(source_cfg, protos), generate_one(target_cfg, protos)};
}

}  // namespace tdss
