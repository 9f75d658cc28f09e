#pragma once

#include "tdss/model.hpp"
#include "tdss/sampling.hpp"

#include <filesystem>
#include <optional>
#include <vector>

namespace tdss {

enum class Optimizer { adam, sgd };

struct TrainConfig {
    Scalar alpha = 0.3;  // alignment weight, in [0, 1]
    Scalar beta = 0.2;   // smoothing weight, in [0, 1]
    Scalar lr = 0.03;    // default tuning grid is {0.01, 0.03, 0.05}
    Index epochs = 200;
    Optimizer optimizer = Optimizer::adam;
    Scalar adam_beta1 = 0.9;
    Scalar adam_beta2 = 0.999;
    Scalar adam_eps = 1e-8;
    std::uint64_t seed = 0;
    Index eval_every = 10;
    SamplerConfig sampler;
    EncoderConfig encoder;
    KernelConfig kernel;
};

void validate(const TrainConfig& cfg);

struct Metrics {
    Scalar micro_f1 = 0;
    Scalar macro_f1 = 0;
    Scalar nmi = 0;
};

struct EpochRecord {
    Index epoch = 0;
    LossBreakdown losses;
    std::optional<Metrics> metrics;  // present on eval epochs, needs target labels
};

struct TrainResult {
    Params params;
    std::vector<EpochRecord> history;
    SampledAdjacency sampled;  // the target A~ the run trained against
};

// Full-batch training of the composite objective. The sampled adjacency is
// built once on the target graph before the first epoch and kept fixed.
// Target labels are only ever read for evaluation metrics; stripping them
// from the bundle yields bit-identical parameters. Deterministic in
// cfg.seed: sub-streams are derive_seed(seed, "init" | "sampler" |
// "dropout", ...). Throws NumericError naming the epoch if the loss leaves
// the finite range.
TrainResult train(const GraphBundle& source, const GraphBundle& target,
                  const TrainConfig& cfg);

// Evaluation metrics of params on a labeled bundle (dropout off).
std::optional<Metrics> evaluate(const GraphBundle& bundle, const Params& params,
                                const EncoderConfig& cfg, Index prop_layers);

// Writes the encoder output as TSV, one node per row, shortest round-trip
// doubles.
void export_embeddings(const Params& params, const GraphBundle& bundle,
                       const EncoderConfig& cfg, Index prop_layers,
                       const std::filesystem::path& out);

// Adam with bias correction. Exposed so the update rule can be checked
// against a scalar reference implementation.
class AdamState {
public:
    AdamState(std::span<const DenseMatrix> shapes, Scalar beta1, Scalar beta2, Scalar eps);
    void step(std::vector<DenseMatrix>& params, const Gradients& grads, Scalar lr);

private:
    std::vector<DenseMatrix> m_;
    std::vector<DenseMatrix> v_;
    Scalar beta1_, beta2_, eps_;
    long t_ = 0;
};

}  // namespace tdss
