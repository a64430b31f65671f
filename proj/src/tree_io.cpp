#include "treestab/tree_io.hpp"

#include <fstream>

#include "treestab/errors.hpp"

namespace treestab {

using nlohmann::json;

json space_to_json(const FeatureSpace& space) {
    json feats = json::array();
    for (const Feature& f : space.features) {
        json jf;
        jf["name"] = f.name;
        if (f.kind == FeatureKind::Numeric) {
            jf["kind"] = "numeric";
            jf["lower"] = f.lower;
            jf["upper"] = f.upper;
        } else {
            jf["kind"] = "categorical";
            if (!f.categories.empty()) {
                jf["categories"] = f.categories;
            } else {
                jf["cardinality"] = f.cardinality;
            }
        }
        feats.push_back(jf);
    }
    json j;
    j["features"] = feats;
    j["classes"] = space.class_names.empty()
                       ? json(space.num_classes)
                       : json(space.class_names);
    return j;
}

FeatureSpace space_from_json(const json& j) {
    require_data(j.is_object() && j.contains("features") && j.contains("classes"),
                 "feature space document needs 'features' and 'classes'");
    FeatureSpace space;
    if (j["classes"].is_array()) {
        space.class_names = j["classes"].get<std::vector<std::string>>();
        space.num_classes = static_cast<int>(space.class_names.size());
    } else {
        require_data(j["classes"].is_number_integer(), "'classes' must be a list or a count");
        space.num_classes = j["classes"].get<int>();
    }
    require_data(j["features"].is_array(), "'features' must be a list");
    for (std::size_t i = 0; i < j["features"].size(); ++i) {
        const json& jf = j["features"][i];
        std::string at = "features[" + std::to_string(i) + "]";
        require_data(jf.is_object() && jf.contains("kind"), at + ": missing 'kind'");
        Feature f;
        f.name = jf.value("name", "f" + std::to_string(i));
        std::string kind = jf["kind"].get<std::string>();
        if (kind == "numeric") {
            require_data(jf.contains("lower") && jf.contains("upper"),
                         at + ": numeric feature needs 'lower' and 'upper'");
            f.kind = FeatureKind::Numeric;
            f.lower = jf["lower"].get<double>();
            f.upper = jf["upper"].get<double>();
        } else if (kind == "categorical") {
            f.kind = FeatureKind::Categorical;
            if (jf.contains("categories")) {
                f.categories = jf["categories"].get<std::vector<std::string>>();
                f.cardinality = static_cast<int>(f.categories.size());
            } else {
                require_data(jf.contains("cardinality"),
                             at + ": categorical feature needs 'categories' or 'cardinality'");
                f.cardinality = jf["cardinality"].get<int>();
            }
        } else {
            throw DataError(at + ": unknown kind '" + kind + "'");
        }
        space.features.push_back(std::move(f));
    }
    space.validate();
    return space;
}

json serialize_tree(const DecisionTree& tree, const FeatureSpace& space) {
    tree.validate(space);
    json nodes = json::array();
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        const Node& n = tree.nodes[i];
        json jn;
        jn["id"] = static_cast<int>(i);
        if (n.kind == Node::Kind::Split) {
            jn["kind"] = "split";
            jn["feature"] = n.feature;
            if (space.features[n.feature].kind == FeatureKind::Numeric) {
                jn["threshold"] = n.threshold;
            } else {
                jn["categories"] = n.categories.to_indices();
            }
            jn["left"] = n.left;
            jn["right"] = n.right;
        } else {
            jn["kind"] = "leaf";
            jn["label"] = n.label;
            if (!n.distribution.empty()) jn["distribution"] = n.distribution;
            if (n.samples > 0) jn["samples"] = n.samples;
        }
        nodes.push_back(jn);
    }
    json doc;
    doc["space_digest"] = space.digest();
    doc["feature_space"] = space_to_json(space);
    doc["depth"] = tree.depth();
    doc["nodes"] = nodes;
    return doc;
}

TreeDocument parse_tree(const json& doc) {
    require_data(doc.is_object(), "tree document must be a JSON object");
    for (const char* key : {"space_digest", "feature_space", "depth", "nodes"})
        require_data(doc.contains(key), std::string("tree document missing '") + key + "'");

    TreeDocument out;
    out.space = space_from_json(doc["feature_space"]);
    out.space_digest = doc["space_digest"].get<std::string>();
    require_data(out.space_digest == out.space.digest(),
                 "space_digest does not match the embedded feature space");

    const json& nodes = doc["nodes"];
    require_data(nodes.is_array() && !nodes.empty(), "'nodes' must be a non-empty list");
    out.tree.nodes.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const json& jn = nodes[i];
        std::string at = "nodes[" + std::to_string(i) + "]";
        require_data(jn.is_object() && jn.contains("id") && jn.contains("kind"),
                     at + ": missing 'id' or 'kind'");
        require_data(jn["id"].get<long>() == static_cast<long>(i),
                     at + ": ids must equal positions in the canonical form");
        Node n;
        std::string kind = jn["kind"].get<std::string>();
        if (kind == "split") {
            n.kind = Node::Kind::Split;
            for (const char* key : {"feature", "left", "right"})
                require_data(jn.contains(key), at + ": split node missing '" + std::string(key) + "'");
            n.feature = jn["feature"].get<int>();
            require_data(n.feature >= 0 && n.feature < out.space.size(),
                         at + ": feature index out of range");
            n.left = jn["left"].get<int>();
            n.right = jn["right"].get<int>();
            const Feature& f = out.space.features[n.feature];
            if (f.kind == FeatureKind::Numeric) {
                require_data(jn.contains("threshold"), at + ": numeric split missing 'threshold'");
                n.threshold = jn["threshold"].get<double>();
            } else {
                require_data(jn.contains("categories"), at + ": categorical split missing 'categories'");
                n.categories = Mask(f.cardinality);
                for (const json& c : jn["categories"]) {
                    long idx = c.get<long>();
                    require_data(idx >= 0 && idx < f.cardinality,
                                 at + ": category index out of range");
                    n.categories.set(static_cast<int>(idx));
                }
            }
        } else if (kind == "leaf") {
            n.kind = Node::Kind::Leaf;
            require_data(jn.contains("label"), at + ": leaf node missing 'label'");
            n.label = jn["label"].get<int>();
            if (jn.contains("distribution"))
                n.distribution = jn["distribution"].get<std::vector<double>>();
            n.samples = jn.value("samples", 0L);
        } else {
            throw DataError(at + ": unknown kind '" + kind + "'");
        }
        out.tree.nodes[i] = std::move(n);
    }
    out.tree.validate(out.space);
    require_data(doc["depth"].get<int>() == out.tree.depth(),
                 "recorded depth does not match the node structure");
    return out;
}

void write_tree_file(const std::string& path, const DecisionTree& tree, const FeatureSpace& space) {
    std::ofstream f(path, std::ios::binary);
    require_data(f.good(), "cannot open for writing: " + path);
    f << serialize_tree(tree, space).dump(2) << "\n";
    require_data(f.good(), "write failed: " + path);
}

TreeDocument read_tree_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    require_data(f.good(), "cannot open tree file: " + path);
    json doc;
    try {
        f >> doc;
    } catch (const json::exception& e) {
        throw DataError(path + ": invalid JSON: " + e.what());
    }
    try {
        return parse_tree(doc);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

}  // namespace treestab
