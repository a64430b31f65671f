#pragma once

#include <span>
#include <vector>

#include "treestab/feature_space.hpp"

namespace treestab {

struct Node {
    enum class Kind { Split, Leaf };
    Kind kind = Kind::Leaf;

    // split nodes
    int feature = -1;
    double threshold = 0.0;  // numeric split: x <= threshold goes left
    Mask categories;         // categorical split: categories in the mask go left
    int left = -1;
    int right = -1;

    // leaf nodes
    int label = -1;
    std::vector<double> distribution;  // empirical class frequencies
    long samples = 0;

    static Node split_numeric(int feature, double threshold, int left, int right) {
        Node n;
        n.kind = Kind::Split;
        n.feature = feature;
        n.threshold = threshold;
        n.left = left;
        n.right = right;
        return n;
    }

    static Node split_categorical(int feature, Mask categories, int left, int right) {
        Node n;
        n.kind = Kind::Split;
        n.feature = feature;
        n.categories = std::move(categories);
        n.left = left;
        n.right = right;
        return n;
    }

    static Node leaf(int label, std::vector<double> distribution = {}, long samples = 0) {
        Node n;
        n.kind = Kind::Leaf;
        n.label = label;
        n.distribution = std::move(distribution);
        n.samples = samples;
        return n;
    }
};

// Binary decision tree; node 0 is the root.
struct DecisionTree {
    std::vector<Node> nodes;

    bool empty() const { return nodes.empty(); }
    long node_count() const { return static_cast<long>(nodes.size()); }
    int depth() const;

    // Structural checks: single root, every node reachable exactly once, children in
    // range, split/leaf field consistency against the space.
    void validate(const FeatureSpace& space) const;

    // Returns the leaf node index reached by the row.
    int descend(std::span<const double> row, const FeatureSpace& space) const;
    int classify(std::span<const double> row, const FeatureSpace& space) const {
        return nodes[descend(row, space)].label;
    }
    const std::vector<double>& leaf_distribution(std::span<const double> row,
                                                 const FeatureSpace& space) const {
        return nodes[descend(row, space)].distribution;
    }
};

}  // namespace treestab
