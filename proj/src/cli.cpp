#include "tdss/cli.hpp"

#include "tdss/bundle_io.hpp"
#include "tdss/discrepancy.hpp"
#include "tdss/metrics.hpp"
#include "tdss/model.hpp"
#include "tdss/sampling.hpp"
#include "tdss/synth.hpp"
#include "tdss/training.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace tdss::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Config handling
// ---------------------------------------------------------------------------

ordered_json default_config() {
    ordered_json synth_domain = {
        {"num_nodes", 300},
        {"feature_dim", 32},
        {"num_classes", 4},
        {"motif_bias", "triangle"},
        {"closure_prob", 0.0},
        {"hub_fraction", 0.0},
        {"intra_class_edge_prob", 0.03},
        {"inter_class_edge_prob", 0.004},
        {"feature_noise", 0.3},
    };
    ordered_json cfg = {
        {"seed", 0},
        {"source_dir", ""},
        {"target_dir", ""},
        {"bundle_dir", ""},
        {"params_path", ""},
        {"train",
         {{"alpha", 0.3},
          {"beta", 0.2},
          {"lr", 0.03},
          {"epochs", 200},
          {"optimizer", "adam"},
          {"eval_every", 10}}},
        {"sampler", {{"mode", "rw"}, {"k", 1}, {"walk_length", 2}, {"num_walks", 3}}},
        {"encoder",
         {{"kind", "sgc"},
          {"hidden_dim", 128},
          {"prop_layers_source", 1},
          {"prop_layers_target", 3},
          {"dropout", 0.5}}},
        {"kernel", {{"bandwidth_mode", "median_heuristic"}, {"sigma", 1.0}}},
        {"synth", {{"source", synth_domain}, {"target", synth_domain}}},
        {"diag",
         {{"xi", 0.05},
          {"k", 2},
          {"r", nullptr},
          {"r_quantile", 0.5},
          {"gamma", nullptr},
          {"upsilon", nullptr}}},
    };
    return cfg;
}

void deep_merge(ordered_json& base, const ordered_json& over) {
    for (const auto& [key, value] : over.items()) {
        if (value.is_object() && base.contains(key) && base[key].is_object()) {
            deep_merge(base[key], value);
        } else {
            base[key] = value;
        }
    }
}

// Sections searched, in order, for a bare override key of each subcommand.
const std::vector<std::string>& preferred_sections(const std::string& cmd) {
    static const std::map<std::string, std::vector<std::string>> table = {
        {"train", {"train", "sampler", "encoder", "kernel"}},
        {"eval", {"encoder"}},
        {"sample", {"sampler"}},
        {"synth", {"synth"}},
        {"diag", {"diag", "encoder", "kernel"}},
    };
    return table.at(cmd);
}

ordered_json parse_override_value(const std::string& raw) {
    const auto parsed = ordered_json::parse(raw, nullptr, false);
    if (!parsed.is_discarded() && !parsed.is_object() && !parsed.is_array()) {
        return parsed;
    }
    return ordered_json(raw);  // unquoted strings like rw, sgc, adam
}

void apply_override(ordered_json& cfg, const std::string& cmd, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("override must look like key=value, got '" + spec + "'");
    }
    const std::string key = spec.substr(0, eq);
    const ordered_json value = parse_override_value(spec.substr(eq + 1));

    if (key.find('.') != std::string::npos) {
        ordered_json* node = &cfg;
        std::size_t pos = 0;
        while (true) {
            const std::size_t dot = key.find('.', pos);
            const std::string part = key.substr(pos, dot - pos);
            if (!node->contains(part)) {
                throw ConfigError("override path '" + key + "' not found in config");
            }
            if (dot == std::string::npos) {
                (*node)[part] = value;
                return;
            }
            node = &(*node)[part];
            pos = dot + 1;
        }
    }

    // "seed" and the other top-level scalars take precedence over sections.
    if (cfg.contains(key) && !cfg[key].is_object()) {
        cfg[key] = value;
        return;
    }
    for (const auto& section : preferred_sections(cmd)) {
        if (section == "synth") {
            const bool in_s = cfg["synth"]["source"].contains(key);
            const bool in_t = cfg["synth"]["target"].contains(key);
            if (in_s || in_t) {
                if (in_s) cfg["synth"]["source"][key] = value;
                if (in_t) cfg["synth"]["target"][key] = value;
                return;
            }
        } else if (cfg.contains(section) && cfg[section].contains(key)) {
            cfg[section][key] = value;
            return;
        }
    }
    // Fall back to a unique match anywhere one level deep.
    std::vector<std::string> hits;
    for (const auto& [section, body] : cfg.items()) {
        if (body.is_object() && body.contains(key)) hits.push_back(section);
    }
    if (hits.size() == 1) {
        cfg[hits[0]][key] = value;
        return;
    }
    if (hits.empty()) {
        throw ConfigError("override key '" + key + "' does not exist in the config");
    }
    throw ConfigError("override key '" + key + "' is ambiguous (in sections " +
                      hits[0] + ", " + hits[1] + ", ...); use a dotted path");
}

// Typed getters with config-flavored errors.

template <typename T>
T get_as(const ordered_json& obj, const std::string& key);

template <>
Scalar get_as<Scalar>(const ordered_json& obj, const std::string& key) {
    if (!obj.contains(key) || !obj[key].is_number()) {
        throw ConfigError("config key '" + key + "' must be a number");
    }
    return obj[key].get<Scalar>();
}

template <>
Index get_as<Index>(const ordered_json& obj, const std::string& key) {
    if (!obj.contains(key) || !obj[key].is_number_integer()) {
        throw ConfigError("config key '" + key + "' must be an integer");
    }
    return obj[key].get<Index>();
}

template <>
std::string get_as<std::string>(const ordered_json& obj, const std::string& key) {
    if (!obj.contains(key) || !obj[key].is_string()) {
        throw ConfigError("config key '" + key + "' must be a string");
    }
    return obj[key].get<std::string>();
}

SamplerConfig parse_sampler(const ordered_json& cfg, std::uint64_t master_seed) {
    const auto& s = cfg.at("sampler");
    SamplerConfig smp;
    const std::string mode = get_as<std::string>(s, "mode");
    if (mode == "khop") {
        smp.mode = SamplerMode::khop;
    } else if (mode == "rw") {
        smp.mode = SamplerMode::rw;
    } else {
        throw ConfigError("sampler mode must be 'khop' or 'rw', got '" + mode + "'");
    }
    smp.k = get_as<Index>(s, "k");
    smp.walk_length = get_as<Index>(s, "walk_length");
    smp.num_walks = get_as<Index>(s, "num_walks");
    smp.seed = derive_seed(master_seed, "sampler");
    return smp;
}

EncoderConfig parse_encoder(const ordered_json& cfg) {
    const auto& e = cfg.at("encoder");
    EncoderConfig enc;
    const std::string kind = get_as<std::string>(e, "kind");
    if (kind == "sgc") {
        enc.kind = EncoderKind::sgc;
    } else if (kind == "gcn") {
        enc.kind = EncoderKind::gcn;
    } else {
        throw ConfigError("encoder kind must be 'sgc' or 'gcn', got '" + kind + "'");
    }
    enc.hidden_dim = get_as<Index>(e, "hidden_dim");
    enc.prop_layers_source = get_as<Index>(e, "prop_layers_source");
    enc.prop_layers_target = get_as<Index>(e, "prop_layers_target");
    enc.dropout = get_as<Scalar>(e, "dropout");
    return enc;
}

KernelConfig parse_kernel(const ordered_json& cfg) {
    const auto& k = cfg.at("kernel");
    KernelConfig kc;
    const std::string mode = get_as<std::string>(k, "bandwidth_mode");
    if (mode == "median_heuristic") {
        kc.mode = BandwidthMode::median_heuristic;
    } else if (mode == "fixed") {
        kc.mode = BandwidthMode::fixed;
    } else {
        throw ConfigError("bandwidth_mode must be 'median_heuristic' or 'fixed'");
    }
    kc.sigma = get_as<Scalar>(k, "sigma");
    return kc;
}

std::uint64_t master_seed(const ordered_json& cfg) {
    if (!cfg.contains("seed") || !cfg["seed"].is_number_integer()) {
        throw ConfigError("config key 'seed' must be an integer");
    }
    return cfg["seed"].get<std::uint64_t>();
}

TrainConfig parse_train(const ordered_json& cfg) {
    const auto& t = cfg.at("train");
    TrainConfig tc;
    tc.alpha = get_as<Scalar>(t, "alpha");
    tc.beta = get_as<Scalar>(t, "beta");
    tc.lr = get_as<Scalar>(t, "lr");
    tc.epochs = get_as<Index>(t, "epochs");
    tc.eval_every = get_as<Index>(t, "eval_every");
    const std::string opt = get_as<std::string>(t, "optimizer");
    if (opt == "adam") {
        tc.optimizer = Optimizer::adam;
    } else if (opt == "sgd") {
        tc.optimizer = Optimizer::sgd;
    } else {
        throw ConfigError("optimizer must be 'adam' or 'sgd', got '" + opt + "'");
    }
    tc.seed = master_seed(cfg);
    tc.sampler = parse_sampler(cfg, tc.seed);
    tc.encoder = parse_encoder(cfg);
    tc.kernel = parse_kernel(cfg);
    return tc;
}

SynthConfig parse_synth_domain(const ordered_json& d, std::uint64_t fallback_seed) {
    SynthConfig sc;
    sc.num_nodes = get_as<Index>(d, "num_nodes");
    sc.feature_dim = get_as<Index>(d, "feature_dim");
    sc.num_classes = get_as<Index>(d, "num_classes");
    const std::string bias = get_as<std::string>(d, "motif_bias");
    if (bias == "triangle") {
        sc.motif_bias = MotifBias::triangle;
    } else if (bias == "star") {
        sc.motif_bias = MotifBias::star;
    } else {
        throw ConfigError("motif_bias must be 'triangle' or 'star', got '" + bias + "'");
    }
    sc.closure_prob = get_as<Scalar>(d, "closure_prob");
    sc.hub_fraction = get_as<Scalar>(d, "hub_fraction");
    sc.intra_class_edge_prob = get_as<Scalar>(d, "intra_class_edge_prob");
    sc.inter_class_edge_prob = get_as<Scalar>(d, "inter_class_edge_prob");
    sc.feature_noise = get_as<Scalar>(d, "feature_noise");
    sc.seed = d.contains("seed") && d["seed"].is_number_integer()
                  ? d["seed"].get<std::uint64_t>()
                  : fallback_seed;
    return sc;
}

std::filesystem::path require_dir_key(const ordered_json& cfg, const std::string& key) {
    const std::string value = get_as<std::string>(cfg, key);
    if (value.empty()) {
        throw ConfigError("config key '" + key + "' is required for this command");
    }
    return value;
}

// ---------------------------------------------------------------------------
// Output writers
// ---------------------------------------------------------------------------

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw DataError("write failed: " + path.string());
}

void write_json(const std::filesystem::path& path, const ordered_json& j) {
    write_text(path, j.dump(2) + "\n");
}

ordered_json metrics_json(const std::optional<Metrics>& m) {
    ordered_json j;
    j["micro_f1"] = m ? ordered_json(m->micro_f1) : ordered_json(nullptr);
    j["macro_f1"] = m ? ordered_json(m->macro_f1) : ordered_json(nullptr);
    j["nmi"] = m ? ordered_json(m->nmi) : ordered_json(nullptr);
    return j;
}

ordered_json census_json(const MotifCensus& c) {
    ordered_json j;
    j["triangles"] = c.triangles;
    j["stars_3"] = c.stars[0];
    j["stars_4"] = c.stars[1];
    j["stars_5"] = c.stars[2];
    j["stars_6"] = c.stars[3];
    return j;
}

ordered_json stats_json(const BundleStats& s) {
    ordered_json j;
    j["num_nodes"] = s.num_nodes;
    j["num_edges"] = s.num_edges;
    j["feature_dim"] = s.feature_dim;
    j["feature_nnz"] = s.feature_nnz;
    j["num_labeled"] = s.num_labeled;
    j["num_classes"] = s.num_classes;
    j["density_n2"] = s.density_n2;
    j["density_pairs"] = s.density_pairs;
    return j;
}

void write_edges_tsv(const std::filesystem::path& path, const SparseMatrix& adj) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    for (Index i = 0; i < adj.outerSize(); ++i) {
        for (SparseMatrix::InnerIterator it(adj, i); it; ++it) {
            if (it.row() < it.col()) out << it.row() << '\t' << it.col() << '\n';
        }
    }
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_train(const ordered_json& cfg, const std::filesystem::path& out_dir) {
    const GraphBundle source = load_bundle(require_dir_key(cfg, "source_dir"));
    const GraphBundle target = load_bundle(require_dir_key(cfg, "target_dir"));
    const TrainConfig tc = parse_train(cfg);

    const TrainResult result = train(source, target, tc);
    save_params(result.params, out_dir / "params.bin");

    std::string history;
    for (const auto& rec : result.history) {
        ordered_json line;
        line["epoch"] = rec.epoch;
        line["l_gc"] = rec.losses.l_gc;
        line["l_da"] = rec.losses.l_da;
        line["l_sr"] = rec.losses.l_sr;
        line["total"] = rec.losses.total;
        deep_merge(line, metrics_json(rec.metrics));
        history += line.dump() + "\n";
    }
    write_text(out_dir / "history.jsonl", history);

    EncoderConfig enc = tc.encoder;
    enc.seed = derive_seed(tc.seed, "init");
    const auto final_metrics =
        evaluate(target, result.params, enc, enc.prop_layers_target);
    ordered_json mj = metrics_json(final_metrics);
    mj["epochs"] = tc.epochs;
    if (!result.history.empty()) {
        const auto& last = result.history.back().losses;
        mj["final_losses"] = {{"l_gc", last.l_gc},
                              {"l_da", last.l_da},
                              {"l_sr", last.l_sr},
                              {"total", last.total}};
    }
    write_json(out_dir / "metrics.json", mj);
    return kExitOk;
}

int cmd_eval(const ordered_json& cfg, const std::filesystem::path& out_dir) {
    const GraphBundle target = load_bundle(require_dir_key(cfg, "target_dir"));
    const std::string params_path = get_as<std::string>(cfg, "params_path");
    if (params_path.empty()) {
        throw ConfigError("config key 'params_path' is required for eval");
    }
    const Params params = load_params(params_path);
    const EncoderConfig enc = parse_encoder(cfg);
    if (!target.labels) {
        throw DataError("eval: target bundle has no labels to evaluate against");
    }
    const auto metrics = evaluate(target, params, enc, enc.prop_layers_target);
    ordered_json mj = metrics_json(metrics);
    const BundleStats st = bundle_stats(target);
    mj["num_eval_nodes"] = st.num_labeled;
    write_json(out_dir / "metrics.json", mj);
    return kExitOk;
}

int cmd_sample(const ordered_json& cfg, const std::filesystem::path& out_dir) {
    const GraphBundle bundle = load_bundle(require_dir_key(cfg, "bundle_dir"));
    const SamplerConfig smp = parse_sampler(cfg, master_seed(cfg));
    const SampledAdjacency sa = build_sampled_adjacency(bundle.graph, smp);

    write_edges_tsv(out_dir / "sampled_edges.tsv", sa.matrix);
    ordered_json stats;
    stats["num_nodes"] = bundle.num_nodes();
    stats["num_edges_original"] = bundle.graph.num_edges();
    stats["num_edges_sampled"] = static_cast<std::int64_t>(sa.matrix.nonZeros() / 2);
    stats["rho"] = sa.rho;
    stats["mode"] = smp.mode == SamplerMode::khop ? "khop" : "rw";
    write_json(out_dir / "stats.json", stats);
    return kExitOk;
}

int cmd_synth(const ordered_json& cfg, const std::filesystem::path& out_dir) {
    const std::uint64_t seed = master_seed(cfg);
    const SynthConfig source_cfg =
        parse_synth_domain(cfg.at("synth").at("source"), derive_seed(seed, "synth-source"));
    const SynthConfig target_cfg =
        parse_synth_domain(cfg.at("synth").at("target"), derive_seed(seed, "synth-target"));
    const auto [source, target] = generate_synthetic_pair(source_cfg, target_cfg);
    save_bundle(source, out_dir / "source");
    save_bundle(target, out_dir / "target");
    return kExitOk;
}

int cmd_diag(const ordered_json& cfg, const std::filesystem::path& out_dir) {
    const GraphBundle source = load_bundle(require_dir_key(cfg, "source_dir"));
    const GraphBundle target = load_bundle(require_dir_key(cfg, "target_dir"));
    const std::string params_path = get_as<std::string>(cfg, "params_path");
    if (params_path.empty()) {
        throw ConfigError("config key 'params_path' is required for diag");
    }
    const Params params = load_params(params_path);
    const EncoderConfig enc = parse_encoder(cfg);
    const auto& diag = cfg.at("diag");
    const std::uint64_t seed = master_seed(cfg);

    SplitMix64 rng(0);
    const DenseMatrix hs = encode(source, params, enc, enc.prop_layers_source, false, rng);
    const DenseMatrix ht = encode(target, params, enc, enc.prop_layers_target, false, rng);

    const MmdResult mmd = mmd2(hs, ht, KernelConfig{BandwidthMode::median_heuristic, 1.0});

    // TVD is reported over histograms of a 1-D projection of the embeddings
    // (along the domain-mean difference), a deliberately coarse diagnostic.
    Scalar tvd_value = 0;
    {
        RowVector dir = ht.colwise().mean() - hs.colwise().mean();
        if (dir.norm() < 1e-12) {
            dir = RowVector::Zero(hs.cols());
            dir(0) = 1.0;
        } else {
            dir /= dir.norm();
        }
        const Vector ps = hs * dir.transpose();
        const Vector pt = ht * dir.transpose();
        const Scalar lo = std::min(ps.minCoeff(), pt.minCoeff());
        const Scalar hi = std::max(ps.maxCoeff(), pt.maxCoeff());
        constexpr int kBins = 16;
        DiscreteDistribution dps, dpt;
        dps.probs.assign(kBins, 0.0);
        dpt.probs.assign(kBins, 0.0);
        const Scalar width = hi > lo ? (hi - lo) / kBins : 1.0;
        auto bin_of = [&](Scalar v) {
            const int b = static_cast<int>((v - lo) / width);
            return std::min(std::max(b, 0), kBins - 1);
        };
        for (Eigen::Index i = 0; i < ps.size(); ++i) dps.probs[bin_of(ps[i])] += 1.0;
        for (Eigen::Index i = 0; i < pt.size(); ++i) dpt.probs[bin_of(pt[i])] += 1.0;
        for (auto& p : dps.probs) p /= static_cast<Scalar>(ps.size());
        for (auto& p : dpt.probs) p /= static_cast<Scalar>(pt.size());
        tvd_value = tvd(dps, dpt);
    }

    // Feature-space scales: a seeded subsample bounds the pairwise work.
    Scalar r_value;
    Scalar gamma_value;
    {
        constexpr Eigen::Index kMaxRows = 512;
        std::vector<Vector> rows;
        const Eigen::Index pooled = source.num_nodes() + target.num_nodes();
        std::vector<Eigen::Index> idx(pooled);
        for (Eigen::Index i = 0; i < pooled; ++i) idx[i] = i;
        SplitMix64 sub(derive_seed(seed, "diag-subsample"));
        const Eigen::Index take = std::min<Eigen::Index>(kMaxRows, pooled);
        for (Eigen::Index i = 0; i < take; ++i) {
            const Eigen::Index j = i + static_cast<Eigen::Index>(sub.next_below(pooled - i));
            std::swap(idx[i], idx[j]);
        }
        for (Eigen::Index i = 0; i < take; ++i) {
            const Eigen::Index global = idx[i];
            rows.push_back(global < source.num_nodes()
                               ? Vector(source.features.row(global).transpose())
                               : Vector(target.features.row(global - source.num_nodes())
                                            .transpose()));
        }
        std::vector<Scalar> linf_dists;
        Scalar max_l2 = 0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            for (std::size_t j = i + 1; j < rows.size(); ++j) {
                linf_dists.push_back((rows[i] - rows[j]).cwiseAbs().maxCoeff());
                max_l2 = std::max(max_l2, (rows[i] - rows[j]).norm());
            }
        }
        std::sort(linf_dists.begin(), linf_dists.end());
        const Scalar q = get_as<Scalar>(diag, "r_quantile");
        if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("diag: r_quantile must be in [0,1]");
        const std::size_t pos = linf_dists.empty()
                                    ? 0
                                    : std::min(linf_dists.size() - 1,
                                               static_cast<std::size_t>(q * linf_dists.size()));
        r_value = linf_dists.empty() ? 1.0 : std::max(linf_dists[pos], 1e-6);
        gamma_value = std::max(max_l2, 1e-6);
    }
    if (diag.contains("r") && diag["r"].is_number()) r_value = diag["r"].get<Scalar>();
    if (diag.contains("gamma") && diag["gamma"].is_number()) {
        gamma_value = diag["gamma"].get<Scalar>();
    }

    // Loss bound: explicit, or the largest realized per-node loss on the
    // labeled source rows.
    Scalar upsilon_value;
    if (diag.contains("upsilon") && diag["upsilon"].is_number()) {
        upsilon_value = diag["upsilon"].get<Scalar>();
    } else {
        if (!source.labels) {
            throw ConfigError("diag: set diag.upsilon explicitly when the source has no labels");
        }
        const DenseMatrix logits = classify(hs, params);
        Scalar worst = 0;
        for (Eigen::Index i = 0; i < logits.rows(); ++i) {
            const Index y = (*source.labels)[i];
            if (y < 0) continue;
            const Scalar row_max = logits.row(i).maxCoeff();
            const Scalar lse =
                row_max + std::log((logits.row(i).array() - row_max).exp().sum());
            worst = std::max(worst, lse - logits(i, y));
        }
        upsilon_value = std::max(worst, 1e-6);
    }

    BoundInputs bi;
    bi.gamma = gamma_value;
    bi.upsilon = upsilon_value;
    bi.k = get_as<Index>(diag, "k");
    bi.r = r_value;
    bi.xi = get_as<Scalar>(diag, "xi");
    bi.phi_s = estimate_smoothness(hs, source.graph, source.features, bi.k, bi.r);
    bi.phi_t = estimate_smoothness(ht, target.graph, target.features, bi.k, bi.r);
    bi.mmd = mmd.value;
    bi.tvd = tvd_value;
    bi.m = source.num_nodes();
    bi.n = target.num_nodes();
    bi.d = source.feature_dim();
    const BoundDiagnostics bd = bound_terms(bi);

    ordered_json j;
    j["bound"] = {{"gamma", bi.gamma},
                  {"upsilon", bi.upsilon},
                  {"phi_s", bi.phi_s},
                  {"phi_t", bi.phi_t},
                  {"phi", bd.phi},
                  {"mmd", bi.mmd},
                  {"mmd_sigma", mmd.sigma},
                  {"tvd", bi.tvd},
                  {"xi", bi.xi},
                  {"r", bi.r},
                  {"k", bi.k},
                  {"m", bi.m},
                  {"n", bi.n},
                  {"d", bi.d},
                  {"log_z", bd.log_z},
                  {"log_k_terms", {bd.log_k_terms[0], bd.log_k_terms[1], bd.log_k_terms[2]}},
                  {"log_k_total", bd.log_k_total}};
    j["census"] = {{"source", census_json(motif_census(source.graph))},
                   {"target", census_json(motif_census(target.graph))}};
    j["stats"] = {{"source", stats_json(bundle_stats(source))},
                  {"target", stats_json(bundle_stats(target))}};
    write_json(out_dir / "diagnostics.json", j);
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Structural-smoothing domain adaptation for graphs"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;
    bool seed_given = false;

    const std::vector<std::string> names = {"train", "eval", "sample", "synth", "diag"};
    const std::map<std::string, std::string> descs = {
        {"train", "train on a source/target bundle pair"},
        {"eval", "evaluate saved params on a labeled bundle"},
        {"sample", "build and dump the sampled adjacency"},
        {"synth", "generate a synthetic source/target bundle pair"},
        {"diag", "risk-bound, census and smoothness diagnostics"},
    };
    for (const auto& name : names) {
        auto* sub = app.add_subcommand(name, descs.at(name));
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--output", output_dir, "output directory")->required();
        sub->add_option("--override", overrides, "key=value config override (repeatable)");
        sub->add_option("--seed", seed, "master seed (overrides the config)")
            ->each([&](const std::string&) { seed_given = true; });
    }

    std::vector<const char*> argv;
    argv.push_back("tdss");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }
    const std::string cmd = app.get_subcommands().front()->get_name();

    try {
        ordered_json cfg = default_config();
        if (!config_path.empty()) {
            std::ifstream in(config_path, std::ios::binary);
            if (!in) throw ConfigError("cannot open config file " + config_path);
            ordered_json user;
            try {
                user = ordered_json::parse(in);
            } catch (const nlohmann::json::exception& e) {
                throw ConfigError(config_path + ": " + e.what());
            }
            if (!user.is_object()) throw ConfigError(config_path + ": config must be a JSON object");
            deep_merge(cfg, user);
        }
        if (seed_given) cfg["seed"] = seed;
        for (const auto& ov : overrides) apply_override(cfg, cmd, ov);

        const std::filesystem::path out_dir = output_dir;
        std::filesystem::create_directories(out_dir);
        write_json(out_dir / "effective_config.json", cfg);

        if (cmd == "train") return cmd_train(cfg, out_dir);
        if (cmd == "eval") return cmd_eval(cfg, out_dir);
        if (cmd == "sample") return cmd_sample(cfg, out_dir);
        if (cmd == "synth") return cmd_synth(cfg, out_dir);
        if (cmd == "diag") return cmd_diag(cfg, out_dir);
        throw ConfigError("unknown command " + cmd);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace tdss::cli
