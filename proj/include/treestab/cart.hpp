#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "treestab/dataset.hpp"
#include "treestab/tree.hpp"
#include "treestab/util.hpp"

namespace treestab {

struct TrainConfig {
    int max_depth = 5;
    int min_samples_leaf = 1;
    uint64_t seed = 0;        // consumed only when feature_subsample > 0
    int feature_subsample = 0;  // features drawn per split; 0 means all
};

// Greedy CART: Gini impurity, numeric candidates at midpoints of consecutive
// distinct sorted values, categorical one-vs-rest subsets, splits requiring a
// strictly positive impurity decrease, ties broken toward the lowest feature
// index and lowest threshold/category. No pruning.
DecisionTree train_tree(const Dataset& data, const TrainConfig& cfg);

struct BootstrapSample {
    Dataset data;
    std::vector<int> indices;  // positions drawn from the source dataset
};

BootstrapSample bootstrap_sample(const Dataset& data, Rng& rng);

// Rank-based (Mann-Whitney) AUC for the positive class 1; tied scores count 1/2.
// Throws DataError when either class is absent.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

// P(class 1) read off the reached leaf for every row.
std::vector<double> tree_scores(const DecisionTree& tree, const Dataset& data);

// Normalized sum of sample-weighted Gini decreases per feature, measured by
// routing the given data through the tree. Zero vector when the tree never splits.
std::vector<double> gini_importance(const DecisionTree& tree, const Dataset& data);

// (depth, node count)
std::pair<int, long> interpretability_metrics(const DecisionTree& tree);

struct ForestConfig {
    int n_trees = 100;
    int max_depth = 5;
    int min_samples_leaf = 1;
    bool bootstrap = true;
    int feature_subsample = -1;  // -1: ceil(sqrt(P)); 0: all features
    uint64_t seed = 0;
};

struct Forest {
    std::vector<DecisionTree> trees;
};

Forest train_forest(const Dataset& data, const ForestConfig& cfg);
std::vector<double> forest_scores(const Forest& forest, const Dataset& data);
std::vector<double> forest_importance(const Forest& forest, const Dataset& data);

}  // namespace treestab
