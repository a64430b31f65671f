#pragma once

#include <string>

#include <json.hpp>

#include "treestab/paths.hpp"
#include "treestab/tree.hpp"

namespace treestab {

struct TreeDocument {
    DecisionTree tree;
    FeatureSpace space;
    std::string space_digest;
};

nlohmann::json space_to_json(const FeatureSpace& space);
FeatureSpace space_from_json(const nlohmann::json& j);

// Canonical self-describing document: space_digest, feature_space, depth, nodes
// (id order, node 0 is the root).
nlohmann::json serialize_tree(const DecisionTree& tree, const FeatureSpace& space);

// Full validation; DataError messages name the offending node. Verifies the
// embedded digest and the recorded depth.
TreeDocument parse_tree(const nlohmann::json& doc);

void write_tree_file(const std::string& path, const DecisionTree& tree, const FeatureSpace& space);
TreeDocument read_tree_file(const std::string& path);

}  // namespace treestab
