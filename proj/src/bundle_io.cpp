#include "tdss/bundle_io.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace tdss {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::filesystem::path& file, std::size_t line,
                       const std::string& msg) {
    throw DataError(file.string() + ":" + std::to_string(line) + ": " + msg);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Calls fn(line_number, line) for each line; tolerates a trailing newline
// and CRLF endings, skips fully empty lines.
template <typename Fn>
void for_each_line(const std::string& text, Fn&& fn) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        ++line_no;
        std::string_view line(text.data() + pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) fn(line_no, line);
        if (end == text.size()) break;
        pos = end + 1;
    }
}

Index parse_index(std::string_view tok, const std::filesystem::path& file,
                  std::size_t line) {
    Index value{};
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        fail(file, line, "expected integer, got '" + std::string(tok) + "'");
    }
    return value;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t tab = line.find('\t', pos);
        if (tab == std::string_view::npos) {
            out.push_back(line.substr(pos));
            return out;
        }
        out.push_back(line.substr(pos, tab - pos));
        pos = tab + 1;
    }
}

}  // namespace

std::string format_double(Scalar v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

Scalar parse_double(std::string_view s, const std::string& context) {
    Scalar value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw DataError(context + ": expected float, got '" + std::string(s) + "'");
    }
    return value;
}

GraphBundle load_bundle(const std::filesystem::path& directory) {
    const auto meta_path = directory / "meta.json";
    const auto edges_path = directory / "edges.tsv";
    const auto features_path = directory / "features.tsv";
    const auto labels_path = directory / "labels.tsv";
    for (const auto& p : {meta_path, edges_path, features_path}) {
        if (!std::filesystem::exists(p)) {
            throw DataError("missing required file " + p.string());
        }
    }

    ordered_json meta;
    try {
        meta = ordered_json::parse(read_file(meta_path));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(meta_path.string() + ": " + e.what());
    }
    for (const char* key : {"num_nodes", "feature_dim", "num_classes", "name"}) {
        if (!meta.contains(key)) {
            throw DataError(meta_path.string() + ": missing key '" + key + "'");
        }
    }
    if (!meta["num_nodes"].is_number_integer() ||
        !meta["feature_dim"].is_number_integer() ||
        !meta["num_classes"].is_number_integer() || !meta["name"].is_string()) {
        throw DataError(meta_path.string() + ": wrong key types");
    }

    GraphBundle bundle;
    const Index num_nodes = meta["num_nodes"].get<Index>();
    const Index feature_dim = meta["feature_dim"].get<Index>();
    bundle.num_classes = meta["num_classes"].get<Index>();
    bundle.name = meta["name"].get<std::string>();
    if (num_nodes < 0 || feature_dim < 0 || bundle.num_classes < 0) {
        throw DataError(meta_path.string() + ": negative counts");
    }

    // edges.tsv
    std::vector<std::pair<Index, Index>> edges;
    for_each_line(read_file(edges_path), [&](std::size_t line_no, std::string_view line) {
        const auto toks = split_tabs(line);
        if (toks.size() != 2) fail(edges_path, line_no, "expected 'u<TAB>v'");
        const Index u = parse_index(toks[0], edges_path, line_no);
        const Index v = parse_index(toks[1], edges_path, line_no);
        if (u < 0 || v < 0 || u >= num_nodes || v >= num_nodes) {
            fail(edges_path, line_no, "node index out of range");
        }
        if (u == v) fail(edges_path, line_no, "self-loop");
        if (u > v) fail(edges_path, line_no, "edges must satisfy u < v");
        edges.emplace_back(u, v);
    });
    {
        auto sorted = edges;
        std::sort(sorted.begin(), sorted.end());
        const auto dup = std::adjacent_find(sorted.begin(), sorted.end());
        if (dup != sorted.end()) {
            throw DataError(edges_path.string() + ": duplicate edge " +
                            std::to_string(dup->first) + "-" +
                            std::to_string(dup->second));
        }
    }
    bundle.graph = Graph::from_edges(num_nodes, edges);

    // features.tsv
    std::vector<Eigen::Triplet<Scalar, Index>> feats;
    std::pair<Index, Index> prev{-1, -1};
    bool feats_sorted = true;
    for_each_line(read_file(features_path), [&](std::size_t line_no, std::string_view line) {
        const auto toks = split_tabs(line);
        if (toks.size() != 3) fail(features_path, line_no, "expected 'node<TAB>dim<TAB>value'");
        const Index node = parse_index(toks[0], features_path, line_no);
        const Index dim = parse_index(toks[1], features_path, line_no);
        if (node < 0 || node >= num_nodes) fail(features_path, line_no, "node index out of range");
        if (dim < 0 || dim >= feature_dim) fail(features_path, line_no, "feature dim out of range");
        Scalar value{};
        try {
            value = parse_double(toks[2], features_path.string() + ":" + std::to_string(line_no));
        } catch (const DataError&) {
            throw;
        }
        if (!std::isfinite(value)) fail(features_path, line_no, "non-finite value");
        const std::pair<Index, Index> cur{node, dim};
        if (cur == prev) fail(features_path, line_no, "duplicate (node, dim) entry");
        if (cur < prev) feats_sorted = false;
        prev = cur;
        feats.emplace_back(node, dim, value);
    });
    if (!feats_sorted) {
        // Out-of-order files are tolerated, but duplicates must still be caught
        // before setFromTriplets silently sums them.
        std::vector<std::pair<Index, Index>> keys;
        keys.reserve(feats.size());
        for (const auto& t : feats) keys.emplace_back(t.row(), t.col());
        std::sort(keys.begin(), keys.end());
        if (std::adjacent_find(keys.begin(), keys.end()) != keys.end()) {
            throw DataError(features_path.string() + ": duplicate (node, dim) entry");
        }
    }
    bundle.features.resize(num_nodes, feature_dim);
    bundle.features.setFromTriplets(feats.begin(), feats.end());
    bundle.features.makeCompressed();

    // labels.tsv (optional)
    if (std::filesystem::exists(labels_path)) {
        std::vector<Index> labels(num_nodes, -1);
        for_each_line(read_file(labels_path), [&](std::size_t line_no, std::string_view line) {
            const auto toks = split_tabs(line);
            if (toks.size() != 2) fail(labels_path, line_no, "expected 'node<TAB>label'");
            const Index node = parse_index(toks[0], labels_path, line_no);
            const Index label = parse_index(toks[1], labels_path, line_no);
            if (node < 0 || node >= num_nodes) fail(labels_path, line_no, "node index out of range");
            if (label < 0 || label >= bundle.num_classes) fail(labels_path, line_no, "label out of range");
            if (labels[node] != -1) fail(labels_path, line_no, "duplicate label for node " + std::to_string(node));
            labels[node] = label;
        });
        bundle.labels = std::move(labels);
    }

    validate_bundle(bundle);
    return bundle;
}

void save_bundle(const GraphBundle& bundle, const std::filesystem::path& directory) {
    std::filesystem::create_directories(directory);

    {
        ordered_json meta;
        meta["num_nodes"] = bundle.num_nodes();
        meta["feature_dim"] = bundle.feature_dim();
        meta["num_classes"] = bundle.num_classes;
        meta["name"] = bundle.name;
        std::ofstream out(directory / "meta.json", std::ios::binary);
        out << meta.dump(2) << "\n";
    }

    {
        std::ofstream out(directory / "edges.tsv", std::ios::binary);
        for (Index u = 0; u < bundle.num_nodes(); ++u) {
            for (const Index v : bundle.graph.neighbors(u)) {
                if (u < v) out << u << '\t' << v << '\n';
            }
        }
    }

    {
        std::ofstream out(directory / "features.tsv", std::ios::binary);
        for (Index i = 0; i < bundle.features.outerSize(); ++i) {
            for (SparseMatrix::InnerIterator it(bundle.features, i); it; ++it) {
                out << it.row() << '\t' << it.col() << '\t'
                    << format_double(it.value()) << '\n';
            }
        }
    }

    if (bundle.labels) {
        std::ofstream out(directory / "labels.tsv", std::ios::binary);
        for (Index i = 0; i < bundle.num_nodes(); ++i) {
            const Index y = (*bundle.labels)[i];
            if (y >= 0) out << i << '\t' << y << '\n';
        }
    }
}

}  // namespace tdss
