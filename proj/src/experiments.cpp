#include "treestab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "treestab/cart.hpp"
#include "treestab/errors.hpp"
#include "treestab/paths.hpp"
#include "treestab/util.hpp"

namespace treestab {

void PerturbationConfig::validate() const {
    if (theta_grid.empty()) throw UsageError("theta grid must not be empty");
    for (size_t i = 0; i < theta_grid.size(); ++i) {
        if (!(theta_grid[i] >= 0.0 && theta_grid[i] <= 1.0))
            throw UsageError("theta grid values must lie in [0, 1]");
        if (i > 0 && !(theta_grid[i] > theta_grid[i - 1]))
            throw UsageError("theta grid must be strictly ascending");
    }
    if (repetitions < 1) throw UsageError("repetitions must be >= 1");
    if (cv_folds < 2) throw UsageError("cross-validation requires at least 2 folds");
    cv_grid.validate();
}

namespace {

void perturb_rec(const DecisionTree& tree, const FeatureSpace& space,
                 const std::vector<double>& deltas, DecisionTree& out, int node,
                 std::vector<double>& lo, std::vector<double>& hi) {
    const Node& n = tree.nodes[static_cast<size_t>(node)];
    if (n.kind == Node::Kind::Leaf) return;
    const Feature& f = space.features[static_cast<size_t>(n.feature)];
    if (f.kind == FeatureKind::Numeric) {
        const double l = lo[static_cast<size_t>(n.feature)];
        const double h = hi[static_cast<size_t>(n.feature)];
        double t = n.threshold * (1.0 + deltas[static_cast<size_t>(node)]);
        if (!(t > l && t < h)) {
            // An out-of-interval target clamps a sixteenth of the interval inside
            // the violated end (floored at a few ulps) so that nested splits on
            // the same feature below keep representable room on both sides.
            const double w = h - l;
            const double scale = std::max(std::fabs(l), std::fabs(h));
            const double ulp =
                std::nextafter(scale, std::numeric_limits<double>::infinity()) - scale;
            const double margin = std::max(w / 16.0, 8.0 * ulp);
            if (l + margin < h - margin) {
                t = std::min(std::max(t, l + margin), h - margin);
            } else {
                t = l + w / 2.0;
            }
            require(t > l && t < h, "perturb_with_deltas: split region exhausted");
        }
        out.nodes[static_cast<size_t>(node)].threshold = t;
        hi[static_cast<size_t>(n.feature)] = t;
        perturb_rec(tree, space, deltas, out, n.left, lo, hi);
        hi[static_cast<size_t>(n.feature)] = h;
        lo[static_cast<size_t>(n.feature)] = t;
        perturb_rec(tree, space, deltas, out, n.right, lo, hi);
        lo[static_cast<size_t>(n.feature)] = l;
    } else {
        perturb_rec(tree, space, deltas, out, n.left, lo, hi);
        perturb_rec(tree, space, deltas, out, n.right, lo, hi);
    }
}

}  // namespace

DecisionTree perturb_with_deltas(const DecisionTree& tree, const FeatureSpace& space,
                                 const std::vector<double>& deltas) {
    tree.validate(space);
    require(deltas.size() == tree.nodes.size(),
            "perturb_with_deltas: one delta per node required");
    DecisionTree out = tree;
    std::vector<double> lo(static_cast<size_t>(space.size())),
        hi(static_cast<size_t>(space.size()));
    for (int j = 0; j < space.size(); ++j) {
        lo[static_cast<size_t>(j)] = space.features[static_cast<size_t>(j)].lower;
        hi[static_cast<size_t>(j)] = space.features[static_cast<size_t>(j)].upper;
    }
    perturb_rec(tree, space, deltas, out, 0, lo, hi);
    out.validate(space);
    return out;
}

DecisionTree perturb_thresholds(const DecisionTree& tree, const FeatureSpace& space,
                                double theta_max, uint64_t seed, PerturbMode mode) {
    if (!(theta_max >= 0.0 && theta_max <= 1.0))
        throw UsageError("theta_max must lie in [0, 1]");
    Rng rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> deltas(tree.nodes.size(), 0.0);
    for (size_t i = 0; i < tree.nodes.size(); ++i) {
        const Node& n = tree.nodes[i];
        if (n.kind != Node::Kind::Split) continue;
        if (space.features[static_cast<size_t>(n.feature)].kind != FeatureKind::Numeric) continue;
        const double u = unif(rng);
        deltas[i] = mode == PerturbMode::Symmetric ? theta_max * (2.0 * u - 1.0)
                                                   : 2.0 * theta_max * (u * theta_max) - theta_max;
    }
    return perturb_with_deltas(tree, space, deltas);
}

namespace {

CurvePoint aggregate(double theta, const std::vector<double>& values) {
    CurvePoint p;
    p.theta = theta;
    p.n = static_cast<int>(values.size());
    for (double v : values) p.mean += v;
    p.mean /= p.n;
    if (p.n > 1) {
        double ss = 0;
        for (double v : values) ss += (v - p.mean) * (v - p.mean);
        p.stddev = std::sqrt(ss / (p.n - 1));
    }
    return p;
}

SensitivityCurve assemble(const std::vector<double>& grid,
                          const std::vector<std::vector<double>>& by_rep) {
    SensitivityCurve curve;
    curve.samples.assign(grid.size(), std::vector<double>(by_rep.size(), 0.0));
    for (size_t r = 0; r < by_rep.size(); ++r)
        for (size_t ti = 0; ti < grid.size(); ++ti) curve.samples[ti][r] = by_rep[r][ti];
    for (size_t ti = 0; ti < grid.size(); ++ti)
        curve.points.push_back(aggregate(grid[ti], curve.samples[ti]));
    return curve;
}

}  // namespace

SensitivityCurve direct_sensitivity(const Dataset& data, const PerturbationConfig& cfg) {
    cfg.validate();
    require_data(data.space.num_classes == 2, "sensitivity experiments require a binary label");

    std::vector<std::vector<double>> by_rep(
        static_cast<size_t>(cfg.repetitions),
        std::vector<double>(cfg.theta_grid.size(), 0.0));
    parallel_for(cfg.repetitions, cfg.threads, [&](int r) {
        CvResult cv = cv_baseline(data, cfg.cv_grid, cfg.cv_folds,
                                  derive_seed(cfg.seed, {static_cast<uint64_t>(r), 0}));
        for (size_t ti = 0; ti < cfg.theta_grid.size(); ++ti) {
            DecisionTree pert = perturb_thresholds(
                cv.tree, data.space, cfg.theta_grid[ti],
                derive_seed(cfg.seed, {static_cast<uint64_t>(r), 1, ti}), cfg.mode);
            by_rep[static_cast<size_t>(r)][ti] =
                tree_distance(cv.tree, pert, data.space, cfg.dcfg).scaled;
        }
    });
    return assemble(cfg.theta_grid, by_rep);
}

SensitivityCurve indirect_sensitivity(const Dataset& data, const PerturbationConfig& cfg) {
    cfg.validate();
    require_data(data.space.num_classes == 2, "sensitivity experiments require a binary label");
    require_data(data.n() >= 4 * cfg.cv_folds, "not enough rows for half-split cross-validation");

    DistanceConfig dcfg = cfg.dcfg;
    if (dcfg.scale_depth == 0) dcfg.scale_depth = cfg.cv_grid.max_depth();

    std::vector<double> grid;
    grid.push_back(0.0);  // sanity point: identical data must give distance 0
    for (double t : cfg.theta_grid)
        if (t > 0.0) grid.push_back(t);

    const int n = data.n();
    const int n1 = n / 2;
    const int n2 = n - n1;

    std::vector<std::vector<double>> by_rep(static_cast<size_t>(cfg.repetitions),
                                            std::vector<double>(grid.size(), 0.0));
    parallel_for(cfg.repetitions, cfg.threads, [&](int r) {
        std::vector<int> perm(static_cast<size_t>(n));
        std::iota(perm.begin(), perm.end(), 0);
        Rng rng(derive_seed(cfg.seed, {static_cast<uint64_t>(r), 0}));
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<int> first(perm.begin(), perm.begin() + n1);
        std::vector<int> second(perm.begin() + n1, perm.end());

        const uint64_t cv_seed = derive_seed(cfg.seed, {static_cast<uint64_t>(r), 1});
        Dataset base_data = data.subset(first);
        CvResult base = cv_baseline(base_data, cfg.cv_grid, cfg.cv_folds, cv_seed);
        PathSet base_paths = extract_paths(base.tree, data.space);

        for (size_t ti = 0; ti < grid.size(); ++ti) {
            int k = static_cast<int>(std::lround(grid[ti] * n1));
            k = std::min(k, std::min(n1, n2));
            std::vector<int> replaced = first;
            for (int i = 0; i < k; ++i)
                replaced[static_cast<size_t>(i)] = second[static_cast<size_t>(i)];
            CvResult retrained = cv_baseline(data.subset(replaced), cfg.cv_grid, cfg.cv_folds,
                                             cv_seed);
            by_rep[static_cast<size_t>(r)][ti] =
                path_set_distance(base_paths, extract_paths(retrained.tree, data.space),
                                  data.space, dcfg)
                    .scaled;
        }
    });
    return assemble(grid, by_rep);
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 2, "spearman: need two equal-length series");
    auto midranks = [](const std::vector<double>& v) {
        const size_t n = v.size();
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return v[a] < v[b]; });
        std::vector<double> rank(n, 0.0);
        size_t i = 0;
        while (i < n) {
            size_t j = i;
            while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
            const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
            for (size_t k = i; k <= j; ++k) rank[order[k]] = r;
            i = j + 1;
        }
        return rank;
    };
    const std::vector<double> rx = midranks(x);
    const std::vector<double> ry = midranks(y);
    const size_t n = x.size();
    double mx = 0, my = 0;
    for (size_t i = 0; i < n; ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace treestab
