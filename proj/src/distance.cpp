#include "treestab/distance.hpp"

#include <algorithm>
#include <cmath>

#include "treestab/assignment.hpp"
#include "treestab/errors.hpp"

namespace treestab {

double path_distance(const TreePath& p, const TreePath& q, const FeatureSpace& space,
                     double lambda) {
    double d = 0.0;
    for (int j = 0; j < space.size(); ++j) {
        const Feature& f = space.features[j];
        if (f.kind == FeatureKind::Numeric) {
            d += (std::fabs(p.upper[j] - q.upper[j]) + std::fabs(p.lower[j] - q.lower[j])) /
                 (2.0 * f.range());
        } else {
            d += static_cast<double>(p.masks[j].xor_count(q.masks[j])) / f.cardinality;
        }
    }
    if (p.label != q.label) d += lambda;
    return d;
}

double path_weight(const TreePath& p, const FeatureSpace& space) {
    double w = 0.0;
    for (int j = 0; j < space.size(); ++j) {
        const Feature& f = space.features[j];
        if (f.kind == FeatureKind::Numeric) {
            if (p.restricted_numeric(j, space))
                w += (p.upper[j] - p.lower[j]) / f.range();
        } else {
            if (p.restricted_categorical(j))
                w += static_cast<double>(p.masks[j].count()) / f.cardinality;
        }
    }
    return w;
}

double upper_bound(int depth, double lambda) {
    require(depth >= 0, "upper_bound: negative depth");
    require(lambda >= 0.0, "upper_bound: negative lambda");
    return std::pow(2.0, depth) * (2.0 * depth + lambda);
}

MatchResult path_set_distance(const PathSet& a, const PathSet& b, const FeatureSpace& space,
                              const DistanceConfig& cfg) {
    require_data(a.size() > 0 && b.size() > 0, "path sets must be non-empty");

    int actual = std::max(a.source_depth, b.source_depth);
    int D = cfg.scale_depth > 0 ? cfg.scale_depth : actual;
    if (D < actual)
        throw UsageError("scale depth " + std::to_string(D) +
                         " is below the deeper tree's depth " + std::to_string(actual));
    double lambda = cfg.lambda >= 0.0 ? cfg.lambda : 2.0 * D;

    const bool first_larger = a.size() >= b.size();
    const PathSet& big = first_larger ? a : b;
    const PathSet& small = first_larger ? b : a;
    const int n = big.size();
    const int m = small.size();

    std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
        double w = path_weight(big.paths[i], space);
        for (int j = 0; j < m; ++j)
            cost[i][j] = path_distance(big.paths[i], small.paths[j], space, lambda);
        for (int j = m; j < n; ++j) cost[i][j] = w;
    }

    Assignment sol = solve_assignment(cost);

    MatchResult out;
    out.lambda = lambda;
    out.scale_depth = D;
    out.bound = upper_bound(D, lambda);
    out.larger_is_first = first_larger;
    out.raw = sol.cost;
    out.scaled = out.bound > 0.0 ? out.raw / out.bound : 0.0;
    for (int i = 0; i < n; ++i) {
        int j = sol.row_to_col[i];
        if (j < m) {
            MatchedPair mp;
            mp.first = first_larger ? i : j;
            mp.second = first_larger ? j : i;
            mp.distance = cost[i][j];
            out.matched.push_back(mp);
        } else {
            out.unmatched.push_back({i, cost[i][j]});
        }
    }
    std::sort(out.matched.begin(), out.matched.end(),
              [](const MatchedPair& x, const MatchedPair& y) { return x.first < y.first; });
    require(static_cast<int>(out.matched.size()) == m, "matching must cover the smaller path set");
    return out;
}

MatchResult tree_distance(const DecisionTree& t1, const DecisionTree& t2,
                          const FeatureSpace& space, const DistanceConfig& cfg) {
    PathSet a = extract_paths(t1, space);
    PathSet b = extract_paths(t2, space);
    return path_set_distance(a, b, space, cfg);
}

double mean_distance(const DecisionTree& tree, const std::vector<DecisionTree>& collection,
                     const FeatureSpace& space, const DistanceConfig& cfg) {
    if (collection.empty()) throw UsageError("mean_distance: empty collection");
    double s = 0.0;
    for (const DecisionTree& t : collection) s += tree_distance(tree, t, space, cfg).scaled;
    return s / static_cast<double>(collection.size());
}

}  // namespace treestab
