#pragma once

#include "tdss/graph.hpp"

#include <filesystem>

namespace tdss {

// Bundle directory layout (all plain text, diffable):
//   meta.json     {"num_nodes": int, "feature_dim": int, "num_classes": int,
//                  "name": string}
//   edges.tsv     "u<TAB>v" per line, 0-indexed, u < v, sorted by (u, v);
//                 each undirected edge listed once
//   features.tsv  "node<TAB>dim<TAB>value" sorted by (node, dim); values are
//                 shortest round-trip decimal doubles
//   labels.tsv    "node<TAB>label", one line per labeled node (optional)
//
// Malformed content fails with a DataError naming the file and line.
GraphBundle load_bundle(const std::filesystem::path& directory);

// Writes the canonical form of the layout above. save_bundle(load_bundle(d))
// reproduces edges.tsv byte for byte.
void save_bundle(const GraphBundle& bundle, const std::filesystem::path& directory);

// Shortest decimal form that parses back to the identical double.
std::string format_double(Scalar v);
Scalar parse_double(std::string_view s, const std::string& context);

}  // namespace tdss
