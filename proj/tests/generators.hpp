#pragma once

// Random feature spaces and structurally valid random trees for property tests.

#include <random>
#include <vector>

#include "treestab/feature_space.hpp"
#include "treestab/paths.hpp"
#include "treestab/tree.hpp"
#include "treestab/util.hpp"

namespace testgen {

using namespace treestab;

inline FeatureSpace random_space(Rng& rng, int min_features = 2, int max_features = 6,
                                 double categorical_prob = 0.4, int max_classes = 3) {
    std::uniform_int_distribution<int> pdist(min_features, max_features);
    std::uniform_int_distribution<int> kdist(2, max_classes);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    FeatureSpace space;
    space.num_classes = kdist(rng);
    int p = pdist(rng);
    for (int j = 0; j < p; ++j) {
        Feature f;
        f.name = "f" + std::to_string(j);
        if (unit(rng) < categorical_prob) {
            f.kind = FeatureKind::Categorical;
            f.cardinality = std::uniform_int_distribution<int>(2, 6)(rng);
        } else {
            f.kind = FeatureKind::Numeric;
            double a = std::uniform_real_distribution<double>(-10.0, 10.0)(rng);
            double w = std::uniform_real_distribution<double>(0.5, 20.0)(rng);
            f.lower = a;
            f.upper = a + w;
        }
        space.features.push_back(f);
    }
    space.validate();
    return space;
}

namespace detail {

struct Region {
    std::vector<double> lo, hi;
    std::vector<Mask> masks;
};

inline int grow(DecisionTree& t, Region& r, const FeatureSpace& space, Rng& rng, int depth,
                int max_depth, double split_prob, int& leaf_budget) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int id = static_cast<int>(t.nodes.size());
    t.nodes.emplace_back();

    std::vector<int> splittable;
    for (int j = 0; j < space.size(); ++j) {
        if (space.features[j].kind == FeatureKind::Numeric) {
            if (r.hi[j] > r.lo[j]) splittable.push_back(j);
        } else {
            if (r.masks[j].count() >= 2) splittable.push_back(j);
        }
    }

    bool make_leaf = depth >= max_depth || splittable.empty() || leaf_budget < 2 ||
                     unit(rng) > split_prob;
    if (make_leaf) {
        t.nodes[id] =
            Node::leaf(std::uniform_int_distribution<int>(0, space.num_classes - 1)(rng));
        return id;
    }

    int j = splittable[std::uniform_int_distribution<std::size_t>(0, splittable.size() - 1)(rng)];
    leaf_budget -= 1;  // a split turns one pending leaf into two
    if (space.features[j].kind == FeatureKind::Numeric) {
        double t0 = r.lo[j], t1 = r.hi[j];
        double thr = t0 + (t1 - t0) * std::uniform_real_distribution<double>(0.05, 0.95)(rng);
        double lo = r.lo[j], hi = r.hi[j];
        t.nodes[id] = Node::split_numeric(j, thr, -1, -1);
        r.hi[j] = thr;
        int left = grow(t, r, space, rng, depth + 1, max_depth, split_prob, leaf_budget);
        r.hi[j] = hi;
        r.lo[j] = thr;
        int right = grow(t, r, space, rng, depth + 1, max_depth, split_prob, leaf_budget);
        r.lo[j] = lo;
        t.nodes[id].left = left;
        t.nodes[id].right = right;
    } else {
        const Feature& f = space.features[j];
        Mask cur = r.masks[j];
        std::vector<int> present = cur.to_indices();
        // random non-empty proper subset of the categories still present
        std::shuffle(present.begin(), present.end(), rng);
        int take = std::uniform_int_distribution<int>(1, static_cast<int>(present.size()) - 1)(rng);
        Mask go_left(f.cardinality);
        for (int i = 0; i < take; ++i) go_left.set(present[i]);
        t.nodes[id] = Node::split_categorical(j, go_left, -1, -1);
        r.masks[j] = cur.intersect(go_left);
        int left = grow(t, r, space, rng, depth + 1, max_depth, split_prob, leaf_budget);
        r.masks[j] = cur.minus(go_left);
        int right = grow(t, r, space, rng, depth + 1, max_depth, split_prob, leaf_budget);
        r.masks[j] = cur;
        t.nodes[id].left = left;
        t.nodes[id].right = right;
    }
    return id;
}

}  // namespace detail

// Structurally valid tree with depth <= max_depth and at most max_leaves leaves.
inline DecisionTree random_tree(const FeatureSpace& space, Rng& rng, int max_depth,
                                double split_prob = 0.75, int max_leaves = 1 << 20) {
    detail::Region r;
    r.lo.resize(space.size());
    r.hi.resize(space.size());
    r.masks.resize(space.size());
    for (int j = 0; j < space.size(); ++j) {
        const Feature& f = space.features[j];
        if (f.kind == FeatureKind::Numeric) {
            r.lo[j] = f.lower;
            r.hi[j] = f.upper;
        } else {
            r.masks[j] = Mask::full(f.cardinality);
        }
    }
    DecisionTree t;
    int budget = max_leaves;
    detail::grow(t, r, space, rng, 0, max_depth, split_prob, budget);
    t.validate(space);
    return t;
}

inline std::vector<double> random_point(const FeatureSpace& space, Rng& rng) {
    std::vector<double> x(space.size());
    for (int j = 0; j < space.size(); ++j) {
        const Feature& f = space.features[j];
        if (f.kind == FeatureKind::Numeric) {
            x[j] = std::uniform_real_distribution<double>(f.lower, f.upper)(rng);
        } else {
            x[j] = std::uniform_int_distribution<int>(0, f.cardinality - 1)(rng);
        }
    }
    return x;
}

}  // namespace testgen
