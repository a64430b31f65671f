#pragma once

#include <vector>

#include "treestab/feature_space.hpp"
#include "treestab/tree.hpp"

namespace treestab {

// Axis-aligned region of a root-to-leaf path plus the leaf's label. Untouched
// numeric features sit at their full range; untouched categorical features keep
// the full mask.
struct TreePath {
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<Mask> masks;  // sized like the space; meaningful for categorical features
    int label = -1;
    int leaf = -1;  // leaf node id in the source tree

    bool restricted_numeric(int j, const FeatureSpace& space) const {
        const Feature& f = space.features[j];
        return upper[j] != f.upper || lower[j] != f.lower;
    }
    bool restricted_categorical(int j) const { return !masks[j].is_full(); }

    bool same_region(const TreePath& o, const FeatureSpace& space) const {
        for (int j = 0; j < space.size(); ++j) {
            if (space.features[j].kind == FeatureKind::Numeric) {
                if (lower[j] != o.lower[j] || upper[j] != o.upper[j]) return false;
            } else {
                if (!(masks[j] == o.masks[j])) return false;
            }
        }
        return label == o.label;
    }
};

struct PathSet {
    std::vector<TreePath> paths;
    int source_depth = 0;

    int size() const { return static_cast<int>(paths.size()); }
};

// Depth-first, left child first; one path per leaf. Throws DataError on trees whose
// split sequence empties a region (inconsistent bounds or empty category mask).
PathSet extract_paths(const DecisionTree& tree, const FeatureSpace& space);

}  // namespace treestab
