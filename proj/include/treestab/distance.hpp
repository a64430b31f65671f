#pragma once

#include <vector>

#include "treestab/paths.hpp"
#include "treestab/tree.hpp"

namespace treestab {

struct DistanceConfig {
    // Class-label weight. Negative means "resolve to 2 * scale depth".
    double lambda = -1.0;
    // Depth used for the normalization bound. 0 means "max of the two tree depths".
    int scale_depth = 0;
};

struct MatchedPair {
    int first = -1;   // path index in the first argument's path set
    int second = -1;  // path index in the second argument's path set
    double distance = 0.0;
};

struct UnmatchedPath {
    int index = -1;  // path index in the larger path set
    double weight = 0.0;
};

struct MatchResult {
    double raw = 0.0;
    double scaled = 0.0;
    double lambda = 0.0;
    int scale_depth = 0;
    double bound = 0.0;
    bool larger_is_first = true;
    std::vector<MatchedPair> matched;
    std::vector<UnmatchedPath> unmatched;
};

// Distance between two root-to-leaf regions: per numeric feature the normalized
// bound displacement, per categorical feature the normalized symmetric mask
// difference, plus lambda when the labels differ.
double path_distance(const TreePath& p, const TreePath& q, const FeatureSpace& space,
                     double lambda);

// Charge for leaving a path unmatched: the covered fraction of every feature the
// path actually restricts.
double path_weight(const TreePath& p, const FeatureSpace& space);

// Normalization bound for depth-D trees: 2^D * (2D + lambda).
double upper_bound(int depth, double lambda);

// Optimal matching between the two path sets; the larger side's surplus paths may
// stay unmatched at cost path_weight. Solved as a square assignment problem after
// padding the smaller side with dummy columns priced at the row's weight.
MatchResult path_set_distance(const PathSet& a, const PathSet& b, const FeatureSpace& space,
                              const DistanceConfig& cfg = {});

MatchResult tree_distance(const DecisionTree& t1, const DecisionTree& t2,
                          const FeatureSpace& space, const DistanceConfig& cfg = {});

// Mean scaled distance from one tree to every tree of a non-empty collection.
double mean_distance(const DecisionTree& tree, const std::vector<DecisionTree>& collection,
                     const FeatureSpace& space, const DistanceConfig& cfg = {});

}  // namespace treestab
