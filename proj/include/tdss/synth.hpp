#pragma once

#include "tdss/graph.hpp"

#include <cstdint>
#include <utility>

namespace tdss {

enum class MotifBias { triangle, star };

// Planted-partition generator with a structural twist per domain: triangle
// mode closes wedges after edge insertion (tight clustered communities),
// star mode wires every non-hub node to a randomly chosen hub (a few
// high-degree centers). Both modes degenerate to the same plain planted
// partition when closure_prob == 0 and hub_fraction == 0.
struct SynthConfig {
    Index num_nodes = 300;
    Index feature_dim = 32;
    Index num_classes = 4;
    MotifBias motif_bias = MotifBias::triangle;
    Scalar closure_prob = 0.0;    // triangle mode: wedge closure probability
    Scalar hub_fraction = 0.0;    // star mode: fraction of nodes made hubs
    Scalar intra_class_edge_prob = 0.03;
    Scalar inter_class_edge_prob = 0.004;
    Scalar feature_noise = 0.3;   // stddev of per-entry Gaussian noise
    std::uint64_t seed = 0;
};

void validate(const SynthConfig& cfg);

// Source and target share class-conditional feature prototypes (identical
// means, so the label-given-feature relation matches across domains) but
// differ in graph structure and noise level. Deterministic given seeds; the
// shared prototypes are derived from the source seed.
std::pair<GraphBundle, GraphBundle> generate_synthetic_pair(
    const SynthConfig& source_cfg, const SynthConfig& target_cfg);

}  // namespace tdss
