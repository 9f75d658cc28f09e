#pragma once

#include "tdss/discrepancy.hpp"
#include "tdss/graph.hpp"
#include "tdss/rng.hpp"
#include "tdss/sampling.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace tdss {

enum class EncoderKind { sgc, gcn };

// The encoder is shared between domains; only the propagation depth differs
// per domain (shallower on the source, deeper on the target graph).
struct EncoderConfig {
    EncoderKind kind = EncoderKind::sgc;
    Index hidden_dim = 128;
    Index prop_layers_source = 1;
    Index prop_layers_target = 3;
    Scalar dropout = 0.5;  // in [0, 1); applied at the inputs of learned layers
    std::uint64_t seed = 0;
};

void validate(const EncoderConfig& cfg);

// Flat list of parameter tensors, ordered per encoder kind:
//   sgc: W (d x h), b (1 x h), Wc (h x C), bc (1 x C)
//   gcn: W1 (d x h), b1 (1 x h), W2 (h x h), b2 (1 x h), Wc (h x C), bc (1 x C)
struct Params {
    EncoderKind kind = EncoderKind::sgc;
    std::vector<DenseMatrix> tensors;

    DenseMatrix& classifier_weight() { return tensors[tensors.size() - 2]; }
    DenseMatrix& classifier_bias() { return tensors[tensors.size() - 1]; }
    const DenseMatrix& classifier_weight() const { return tensors[tensors.size() - 2]; }
    const DenseMatrix& classifier_bias() const { return tensors[tensors.size() - 1]; }
};

// Glorot-uniform weights, zero biases, deterministic in cfg.seed.
Params init_params(const EncoderConfig& cfg, Index feature_dim, Index num_classes);

// Flat binary format: little-endian 64-bit magic, tensor count and shape
// table, then row-major float64 payloads. Reload is bit-exact.
void save_params(const Params& params, const std::filesystem::path& path);
Params load_params(const std::filesystem::path& path);

// S^L X for SGC (the whole linear propagation), S X for GCN (the first
// layer's aggregation); parameter-independent, so computed once per domain.
SparseMatrix propagated_input(const Graph& g, const SparseMatrix& features,
                              EncoderKind kind, Index prop_layers);

// Encoder forward pass.
//   sgc: H = dropout(S^L X) W + b           (linear; no activation)
//   gcn: H = dropout(S^L relu(dropout(S X) W1 + b1)) W2 + b2
// Dropout is inverted (scaled by 1/(1-p)) and only active when training.
DenseMatrix encode(const GraphBundle& bundle, const Params& params,
                   const EncoderConfig& cfg, Index prop_layers, bool training,
                   SplitMix64& rng);

// logits = H Wc + bc
DenseMatrix classify(const DenseMatrix& h, const Params& params);

struct CrossEntropyResult {
    Scalar value = 0;
    DenseMatrix grad_logits;
};

// Mean softmax cross-entropy over rows whose label is >= 0. Throws if no row
// is labeled or a label is out of range.
CrossEntropyResult cross_entropy(const DenseMatrix& logits,
                                 std::span<const Index> labels, Index num_classes);

struct LossBreakdown {
    Scalar l_gc = 0;
    Scalar l_da = 0;
    Scalar l_sr = 0;
    Scalar total = 0;  // l_gc + alpha * l_da + beta * l_sr, exactly
};

struct Gradients {
    std::vector<DenseMatrix> tensors;  // same shapes and order as Params
};

struct ForwardBackwardResult {
    LossBreakdown breakdown;
    Gradients grads;
    Scalar mmd_sigma = 0;  // bandwidth used by the alignment term (0 if skipped)
};

// Parameter-independent per-domain precomputation shared across epochs.
struct PropagationCache {
    SparseMatrix prop_source;
    SparseMatrix prop_target;
    SparseMatrix shat_source;  // normalized adjacency with self-loops (gcn)
    SparseMatrix shat_target;
};

PropagationCache prepare_propagation(const GraphBundle& source,
                                     const GraphBundle& target,
                                     const EncoderConfig& cfg);

// One full-batch pass of the composite objective
//
//   L = L_GC(source) + alpha * MMD^2(H_s, H_t) + beta * L_SR(H_t, A~)
//
// returning the loss breakdown and exact analytic gradients for every
// parameter. Terms with a zero weight are skipped entirely, so an ablated
// run is parameter-for-parameter identical to a build without that term.
// Deterministic given dropout_seed; dropout only applies when training.
ForwardBackwardResult forward_backward(const GraphBundle& source,
                                       const GraphBundle& target,
                                       const SampledAdjacency& sa,
                                       const Params& params,
                                       const EncoderConfig& cfg,
                                       const KernelConfig& kernel,
                                       Scalar alpha, Scalar beta, bool training,
                                       std::uint64_t dropout_seed,
                                       const PropagationCache* cache = nullptr);

}  // namespace tdss
