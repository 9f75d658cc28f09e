#include "tdss/training.hpp"

#include "tdss/bundle_io.hpp"
#include "tdss/metrics.hpp"

#include <cmath>
#include <fstream>

namespace tdss {

void validate(const TrainConfig& cfg) {
    if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0)) {
        throw ConfigError("train: alpha must be in [0, 1]");
    }
    if (!(cfg.beta >= 0.0 && cfg.beta <= 1.0)) {
        throw ConfigError("train: beta must be in [0, 1]");
    }
    if (!(cfg.lr > 0.0)) throw ConfigError("train: lr must be > 0");
    if (cfg.epochs < 0) throw ConfigError("train: negative epoch count");
    if (cfg.eval_every < 1) throw ConfigError("train: eval_every must be >= 1");
    if (!(cfg.adam_beta1 >= 0.0 && cfg.adam_beta1 < 1.0) ||
        !(cfg.adam_beta2 >= 0.0 && cfg.adam_beta2 < 1.0) || !(cfg.adam_eps > 0.0)) {
        throw ConfigError("train: bad adam parameters");
    }
    validate(cfg.encoder);
    validate(cfg.sampler);
}

AdamState::AdamState(std::span<const DenseMatrix> shapes, Scalar beta1, Scalar beta2,
                     Scalar eps)
    : beta1_(beta1), beta2_(beta2), eps_(eps) {
    m_.reserve(shapes.size());
    v_.reserve(shapes.size());
    for (const auto& t : shapes) {
        m_.push_back(DenseMatrix::Zero(t.rows(), t.cols()));
        v_.push_back(DenseMatrix::Zero(t.rows(), t.cols()));
    }
}

void AdamState::step(std::vector<DenseMatrix>& params, const Gradients& grads, Scalar lr) {
    ++t_;
    const Scalar bc1 = 1.0 - std::pow(beta1_, static_cast<Scalar>(t_));
    const Scalar bc2 = 1.0 - std::pow(beta2_, static_cast<Scalar>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& g = grads.tensors[i].array();
        m_[i].array() = beta1_ * m_[i].array() + (1.0 - beta1_) * g;
        v_[i].array() = beta2_ * v_[i].array() + (1.0 - beta2_) * g.square();
        params[i].array() -=
            lr * (m_[i].array() / bc1) / ((v_[i].array() / bc2).sqrt() + eps_);
    }
}

std::optional<Metrics> evaluate(const GraphBundle& bundle, const Params& params,
                                const EncoderConfig& cfg, Index prop_layers) {
    if (!bundle.labels) return std::nullopt;
    SplitMix64 rng(0);  // unused: dropout is off at evaluation
    const DenseMatrix h = encode(bundle, params, cfg, prop_layers, false, rng);
    const std::vector<Index> pred = argmax_rows(classify(h, params));

    std::vector<Index> pred_labeled;
    std::vector<Index> truth_labeled;
    for (Index i = 0; i < bundle.num_nodes(); ++i) {
        const Index y = (*bundle.labels)[i];
        if (y < 0) continue;
        pred_labeled.push_back(pred[i]);
        truth_labeled.push_back(y);
    }
    if (pred_labeled.empty()) return std::nullopt;

    Metrics m;
    m.micro_f1 = micro_f1(pred_labeled, truth_labeled, bundle.num_classes);
    m.macro_f1 = macro_f1(pred_labeled, truth_labeled, bundle.num_classes);
    m.nmi = nmi(pred_labeled, truth_labeled);
    return m;
}

TrainResult train(const GraphBundle& source, const GraphBundle& target,
                  const TrainConfig& cfg) {
    validate(cfg);
    if (source.feature_dim() != target.feature_dim() ||
        source.num_classes != target.num_classes) {
        throw DataError("train: bundles disagree on feature_dim or num_classes");
    }

    // Single master seed; every stream is derived so components stay
    // individually reproducible.
    EncoderConfig enc = cfg.encoder;
    enc.seed = derive_seed(cfg.seed, "init");
    SamplerConfig smp = cfg.sampler;
    smp.seed = derive_seed(cfg.seed, "sampler");

    TrainResult result;
    // The sampled adjacency is built once, on the target graph only, before
    // any training step.
    result.sampled = build_sampled_adjacency(target.graph, smp);
    result.params = init_params(enc, source.feature_dim(), source.num_classes);

    const PropagationCache cache = prepare_propagation(source, target, enc);
    AdamState adam(result.params.tensors, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);

    for (Index epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto fb = forward_backward(source, target, result.sampled, result.params,
                                         enc, cfg.kernel, cfg.alpha, cfg.beta, true,
                                         derive_seed(cfg.seed, "dropout",
                                                     static_cast<std::uint64_t>(epoch)),
                                         &cache);
        if (!std::isfinite(fb.breakdown.total)) {
            throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch));
        }

        if (cfg.optimizer == Optimizer::adam) {
            adam.step(result.params.tensors, fb.grads, cfg.lr);
        } else {
            for (std::size_t i = 0; i < result.params.tensors.size(); ++i) {
                result.params.tensors[i] -= cfg.lr * fb.grads.tensors[i];
            }
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.losses = fb.breakdown;
        // Losses are the pre-step values; metrics evaluate the post-step
        // parameters, so the last record matches the returned params.
        const bool eval_epoch =
            (epoch + 1) % cfg.eval_every == 0 || epoch + 1 == cfg.epochs;
        if (eval_epoch) {
            rec.metrics = evaluate(target, result.params, enc, enc.prop_layers_target);
        }
        result.history.push_back(std::move(rec));
    }
    return result;
}

void export_embeddings(const Params& params, const GraphBundle& bundle,
                       const EncoderConfig& cfg, Index prop_layers,
                       const std::filesystem::path& out) {
    SplitMix64 rng(0);  // unused: dropout off
    const DenseMatrix h = encode(bundle, params, cfg, prop_layers, false, rng);
    std::ofstream file(out, std::ios::binary);
    if (!file) throw DataError("cannot open " + out.string() + " for writing");
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
        for (Eigen::Index j = 0; j < h.cols(); ++j) {
            if (j > 0) file << '\t';
            file << format_double(h(i, j));
        }
        file << '\n';
    }
    if (!file) throw DataError("write failed: " + out.string());
}

}  // namespace tdss
