#pragma once

#include <cstdint>
#include <vector>

#include "treestab/cart.hpp"
#include "treestab/dataset.hpp"
#include "treestab/distance.hpp"

namespace treestab {

struct GridConfig {
    std::vector<int> depth_grid = {3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    std::vector<int> min_leaf_grid = {3, 5, 10, 30, 50};
    int bootstraps_per_cell = 2;

    int max_depth() const;
    int size() const {
        return static_cast<int>(depth_grid.size() * min_leaf_grid.size()) * bootstraps_per_cell;
    }
    void validate() const;
};

struct CollectionMember {
    DecisionTree tree;
    int max_depth = 0;
    int min_samples_leaf = 0;
    int bootstrap_index = 0;
    std::vector<int> sample_rows;  // row_ids drawn into the bootstrap
};

// One tree per (depth, min-leaf, bootstrap) grid point, each trained on its own
// bootstrap of the data. Deterministic for a fixed seed regardless of worker count.
std::vector<CollectionMember> build_collection(const Dataset& data, const GridConfig& grid,
                                               uint64_t seed, int threads = 1);

struct ScoredTree {
    int index = -1;      // position in the candidate collection
    double distance = 0; // mean scaled distance to the reference collection
    double auc = 0;      // holdout AUC
    long nodes = 0;
    int depth = 0;
};

std::vector<ScoredTree> score_collection(const std::vector<CollectionMember>& candidates,
                                         const std::vector<CollectionMember>& reference,
                                         const Dataset& holdout, const FeatureSpace& space,
                                         const DistanceConfig& dcfg, int threads = 1);

// Indices into `scored` of the non-dominated points, ordered by rising distance.
// With use_nodes, node count joins as a third (minimized) objective. Duplicate
// coordinate vectors are all kept.
std::vector<int> pareto_frontier(const std::vector<ScoredTree>& scored, bool use_nodes = false);

enum class SelectionRule { MaxAuc, MinDistance, EpsilonConstrained, Balanced };

struct Selection {
    int scored_index = -1;
    bool fallback = false;  // epsilon rule found no qualifying tree
};

Selection select_tree(const std::vector<ScoredTree>& scored, const std::vector<int>& frontier,
                      SelectionRule rule, double epsilon = 0.05);

struct CvResult {
    DecisionTree tree;
    int best_depth = 0;
    int best_min_leaf = 0;
    std::vector<std::vector<double>> fold_auc;  // [cell][fold], NaN when not evaluable
    std::vector<double> mean_auc;               // [cell]
};

// K-fold cross-validation over the same grid, refit on all rows with the winning
// cell. Ties go to the earlier cell (lower depth, then lower min-leaf).
CvResult cv_baseline(const Dataset& data, const GridConfig& grid, int folds, uint64_t seed);

struct MethodMetrics {
    double auc = 0;
    double distance = 0;
    bool has_distance = true;
    int depth = 0;
    long nodes = 0;
    int grid_depth = 0;     // hyperparameters of the underlying tree, when applicable
    int grid_min_leaf = 0;
    std::vector<double> importance;
};

struct RepetitionResult {
    int rep = 0;
    bool failed = false;    // degenerate repetition, recorded and skipped
    std::string failure;
    std::vector<ScoredTree> scored;
    std::vector<int> frontier;
    Selection selected;
    MethodMetrics pareto_auc;       // AUC-maximizing frontier tree
    MethodMetrics pareto_distance;  // distance-minimizing frontier tree
    MethodMetrics selected_tree;    // the configured selection rule
    MethodMetrics cv;
    MethodMetrics forest;
};

struct PipelineConfig {
    GridConfig grid;
    int repetitions = 10;
    double holdout_fraction = 0.33;
    double batch_fraction = 0.5;
    SelectionRule selection = SelectionRule::EpsilonConstrained;
    double epsilon = 0.05;
    bool three_objectives = false;
    // Leakage-averse mode: score candidate AUC on a validation slice carved out
    // of the training portion; reported method AUC always uses the holdout.
    bool three_way_split = false;
    double validation_fraction = 0.25;  // of the non-holdout rows, three-way mode only
    int cv_folds = 5;
    int forest_trees = 100;
    uint64_t seed = 0;
    int threads = 1;
    int scale_depth = 0;   // 0: the grid's maximum depth
    double lambda = -1.0;  // negative: 2 * scale depth
};

struct PipelineResult {
    PipelineConfig cfg;
    std::vector<RepetitionResult> reps;
    DistanceConfig dcfg;  // resolved distance configuration
};

PipelineResult run_pipeline(const Dataset& data, const PipelineConfig& cfg);

}  // namespace treestab
