#pragma once

#include <cstdint>
#include <vector>

#include "treestab/dataset.hpp"
#include "treestab/distance.hpp"
#include "treestab/stability.hpp"
#include "treestab/tree.hpp"

namespace treestab {

// How the per-node multiplicative noise is drawn for a threshold t -> t * (1 + delta):
//   Symmetric (default): delta ~ U[-theta_max, +theta_max]
//   Literal:             u ~ U[0, theta_max], delta = 2 * theta_max * u - theta_max
// The two coincide at theta_max = 1; Literal skews negative for smaller theta_max.
enum class PerturbMode { Symmetric, Literal };

struct PerturbationConfig {
    std::vector<double> theta_grid;  // ascending values in [0, 1]
    int repetitions = 100;
    uint64_t seed = 0;
    DistanceConfig dcfg;  // scale_depth 0 keeps each experiment's documented default
    PerturbMode mode = PerturbMode::Symmetric;
    GridConfig cv_grid;  // hyperparameter grid for the cross-validated base trees
    int cv_folds = 5;
    int threads = 1;

    void validate() const;
};

// Deterministic variant used by tests and internally: deltas[i] applies to node i.
// Perturbed thresholds are clamped strictly inside the node's reaching interval so
// nested splits on the same feature keep non-empty regions on both sides.
DecisionTree perturb_with_deltas(const DecisionTree& tree, const FeatureSpace& space,
                                 const std::vector<double>& deltas);

// Multiplies every numeric threshold by (1 + delta) with an independent draw per
// split node (node-index order); categorical splits, labels, and topology are
// untouched.
DecisionTree perturb_thresholds(const DecisionTree& tree, const FeatureSpace& space,
                                double theta_max, uint64_t seed,
                                PerturbMode mode = PerturbMode::Symmetric);

struct CurvePoint {
    double theta = 0;
    double mean = 0;
    double stddev = 0;  // sample standard deviation across repetitions (0 when n < 2)
    int n = 0;
};

struct SensitivityCurve {
    std::vector<CurvePoint> points;
    std::vector<std::vector<double>> samples;  // [theta index][repetition]
};

// Per repetition: cross-validate a tree on the full dataset, perturb its
// thresholds at every theta in the grid, and record the scaled distance between
// the original and perturbed trees. Default distance scaling uses the two trees'
// own depth (they are equal by construction).
SensitivityCurve direct_sensitivity(const Dataset& data, const PerturbationConfig& cfg);

// Per repetition: shuffle, train a base tree on the first half via
// cross-validation, then for each theta replace the leading theta-fraction of
// the first half with rows from the second half, retrain with the same
// cross-validation seed, and record the scaled distance to the base tree.
// A theta = 0 sanity point is always prepended; its distance is exactly 0.
// Default distance scaling uses the hyperparameter grid's maximum depth.
SensitivityCurve indirect_sensitivity(const Dataset& data, const PerturbationConfig& cfg);

// Spearman rank correlation (midrank ties).
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace treestab
