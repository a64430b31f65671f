#include "treestab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "treestab/errors.hpp"
#include "treestab/paths.hpp"
#include "treestab/util.hpp"

namespace treestab {

namespace {

struct GridCell {
    int depth;
    int min_leaf;
};

std::vector<GridCell> grid_cells(const GridConfig& grid) {
    std::vector<GridCell> cells;
    cells.reserve(grid.depth_grid.size() * grid.min_leaf_grid.size());
    for (int d : grid.depth_grid)
        for (int m : grid.min_leaf_grid) cells.push_back({d, m});
    return cells;
}

}  // namespace

int GridConfig::max_depth() const {
    validate();
    return *std::max_element(depth_grid.begin(), depth_grid.end());
}

void GridConfig::validate() const {
    if (depth_grid.empty() || min_leaf_grid.empty())
        throw UsageError("hyperparameter grid must not be empty");
    for (int d : depth_grid)
        if (d < 1) throw UsageError("depth grid entries must be >= 1");
    for (int m : min_leaf_grid)
        if (m < 1) throw UsageError("min-leaf grid entries must be >= 1");
    if (bootstraps_per_cell < 1) throw UsageError("bootstraps per grid cell must be >= 1");
}

std::vector<CollectionMember> build_collection(const Dataset& data, const GridConfig& grid,
                                               uint64_t seed, int threads) {
    grid.validate();
    require_data(data.n() >= 2, "cannot build a tree collection from fewer than 2 rows");
    const std::vector<GridCell> cells = grid_cells(grid);
    const int total = static_cast<int>(cells.size()) * grid.bootstraps_per_cell;
    std::vector<CollectionMember> members(static_cast<size_t>(total));
    parallel_for(total, threads, [&](int idx) {
        const int cell_idx = idx / grid.bootstraps_per_cell;
        const int b = idx % grid.bootstraps_per_cell;
        Rng rng(derive_seed(seed, {static_cast<uint64_t>(cell_idx), static_cast<uint64_t>(b)}));
        BootstrapSample sample = bootstrap_sample(data, rng);
        TrainConfig tc;
        tc.max_depth = cells[static_cast<size_t>(cell_idx)].depth;
        tc.min_samples_leaf = cells[static_cast<size_t>(cell_idx)].min_leaf;
        CollectionMember m;
        m.tree = train_tree(sample.data, tc);
        m.max_depth = tc.max_depth;
        m.min_samples_leaf = tc.min_samples_leaf;
        m.bootstrap_index = b;
        m.sample_rows.reserve(sample.indices.size());
        for (int i : sample.indices) m.sample_rows.push_back(data.row_ids[static_cast<size_t>(i)]);
        members[static_cast<size_t>(idx)] = std::move(m);
    });
    return members;
}

std::vector<ScoredTree> score_collection(const std::vector<CollectionMember>& candidates,
                                         const std::vector<CollectionMember>& reference,
                                         const Dataset& holdout, const FeatureSpace& space,
                                         const DistanceConfig& dcfg, int threads) {
    require(!candidates.empty(), "score_collection: empty candidate collection");
    require(!reference.empty(), "score_collection: empty reference collection");
    std::vector<PathSet> ref_paths(reference.size());
    for (size_t i = 0; i < reference.size(); ++i)
        ref_paths[i] = extract_paths(reference[i].tree, space);

    std::vector<ScoredTree> scored(candidates.size());
    parallel_for(static_cast<int>(candidates.size()), threads, [&](int i) {
        const DecisionTree& tree = candidates[static_cast<size_t>(i)].tree;
        PathSet mine = extract_paths(tree, space);
        double sum = 0;
        for (const PathSet& ref : ref_paths) sum += path_set_distance(mine, ref, space, dcfg).scaled;
        ScoredTree s;
        s.index = i;
        s.distance = sum / static_cast<double>(ref_paths.size());
        s.auc = auc(tree_scores(tree, holdout), holdout.labels);
        s.nodes = tree.node_count();
        s.depth = tree.depth();
        scored[static_cast<size_t>(i)] = s;
    });
    return scored;
}

std::vector<int> pareto_frontier(const std::vector<ScoredTree>& scored, bool use_nodes) {
    const int n = static_cast<int>(scored.size());
    std::vector<int> keep;
    if (n == 0) return keep;
    if (!use_nodes) {
        // Sort by distance; within a distance tie the highest-AUC members survive
        // provided they strictly beat the best AUC seen at smaller distance.
        std::vector<int> order(static_cast<size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            const ScoredTree& x = scored[static_cast<size_t>(a)];
            const ScoredTree& y = scored[static_cast<size_t>(b)];
            if (x.distance != y.distance) return x.distance < y.distance;
            if (x.auc != y.auc) return x.auc > y.auc;
            return a < b;
        });
        double best_auc = -std::numeric_limits<double>::infinity();
        size_t i = 0;
        while (i < order.size()) {
            size_t j = i;
            const double d = scored[static_cast<size_t>(order[i])].distance;
            while (j < order.size() && scored[static_cast<size_t>(order[j])].distance == d) ++j;
            const double group_max = scored[static_cast<size_t>(order[i])].auc;
            if (group_max > best_auc) {
                for (size_t k = i; k < j; ++k) {
                    if (scored[static_cast<size_t>(order[k])].auc == group_max)
                        keep.push_back(order[k]);
                }
                best_auc = group_max;
            }
            i = j;
        }
    } else {
        for (int a = 0; a < n; ++a) {
            const ScoredTree& x = scored[static_cast<size_t>(a)];
            bool dominated = false;
            for (int b = 0; b < n && !dominated; ++b) {
                if (b == a) continue;
                const ScoredTree& y = scored[static_cast<size_t>(b)];
                const bool weakly = y.distance <= x.distance && y.auc >= x.auc && y.nodes <= x.nodes;
                const bool strictly =
                    y.distance < x.distance || y.auc > x.auc || y.nodes < x.nodes;
                if (weakly && strictly) dominated = true;
            }
            if (!dominated) keep.push_back(a);
        }
        std::sort(keep.begin(), keep.end(), [&](int a, int b) {
            const ScoredTree& x = scored[static_cast<size_t>(a)];
            const ScoredTree& y = scored[static_cast<size_t>(b)];
            if (x.distance != y.distance) return x.distance < y.distance;
            if (x.auc != y.auc) return x.auc > y.auc;
            return a < b;
        });
    }
    return keep;
}

Selection select_tree(const std::vector<ScoredTree>& scored, const std::vector<int>& frontier,
                      SelectionRule rule, double epsilon) {
    require(!frontier.empty(), "select_tree: empty frontier");
    for (int idx : frontier)
        require(idx >= 0 && idx < static_cast<int>(scored.size()), "select_tree: bad frontier index");

    auto argmax = [&](auto objective) {
        int best = frontier.front();
        double best_f = objective(scored[static_cast<size_t>(best)]);
        for (size_t i = 1; i < frontier.size(); ++i) {
            const int idx = frontier[i];
            const ScoredTree& s = scored[static_cast<size_t>(idx)];
            const ScoredTree& cur = scored[static_cast<size_t>(best)];
            const double f = objective(s);
            if (f > best_f ||
                (f == best_f && (s.distance < cur.distance ||
                                 (s.distance == cur.distance && idx < best)))) {
                best = idx;
                best_f = f;
            }
        }
        return best;
    };

    Selection sel;
    switch (rule) {
        case SelectionRule::MaxAuc:
            sel.scored_index = argmax([](const ScoredTree& s) { return s.auc; });
            break;
        case SelectionRule::MinDistance:
            sel.scored_index = argmax([](const ScoredTree& s) { return -s.distance; });
            break;
        case SelectionRule::Balanced:
            sel.scored_index = argmax([](const ScoredTree& s) { return (-s.distance + s.auc) / 2.0; });
            break;
        case SelectionRule::EpsilonConstrained: {
            double max_auc = -std::numeric_limits<double>::infinity();
            for (int idx : frontier) max_auc = std::max(max_auc, scored[static_cast<size_t>(idx)].auc);
            const double floor = (1.0 - epsilon) * max_auc;
            bool any = false;
            for (int idx : frontier)
                if (scored[static_cast<size_t>(idx)].auc >= floor) any = true;
            if (!any) {
                sel.scored_index = argmax([](const ScoredTree& s) { return s.auc; });
                sel.fallback = true;
            } else {
                sel.scored_index = argmax([&](const ScoredTree& s) {
                    return s.auc >= floor ? 1.0 - s.distance
                                          : -std::numeric_limits<double>::infinity();
                });
            }
            break;
        }
    }
    return sel;
}

CvResult cv_baseline(const Dataset& data, const GridConfig& grid, int folds, uint64_t seed) {
    grid.validate();
    if (folds < 2) throw UsageError("cross-validation requires at least 2 folds");
    require_data(data.n() >= folds, "fewer rows than cross-validation folds");

    const int n = data.n();
    std::vector<int> perm(static_cast<size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(derive_seed(seed, {0}));
    std::shuffle(perm.begin(), perm.end(), rng);

    // Contiguous near-equal blocks of the shuffled order.
    std::vector<std::vector<int>> fold_rows(static_cast<size_t>(folds));
    for (int f = 0; f < folds; ++f) {
        const int lo = static_cast<int>(static_cast<long>(n) * f / folds);
        const int hi = static_cast<int>(static_cast<long>(n) * (f + 1) / folds);
        fold_rows[static_cast<size_t>(f)].assign(perm.begin() + lo, perm.begin() + hi);
    }

    const std::vector<GridCell> cells = grid_cells(grid);
    CvResult result;
    result.fold_auc.assign(cells.size(), std::vector<double>(static_cast<size_t>(folds),
                                                             std::numeric_limits<double>::quiet_NaN()));
    result.mean_auc.assign(cells.size(), -std::numeric_limits<double>::infinity());

    std::vector<Dataset> train_parts(static_cast<size_t>(folds));
    std::vector<Dataset> eval_parts(static_cast<size_t>(folds));
    for (int f = 0; f < folds; ++f) {
        std::vector<int> train_idx;
        train_idx.reserve(static_cast<size_t>(n));
        for (int g = 0; g < folds; ++g)
            if (g != f)
                train_idx.insert(train_idx.end(), fold_rows[static_cast<size_t>(g)].begin(),
                                 fold_rows[static_cast<size_t>(g)].end());
        train_parts[static_cast<size_t>(f)] = data.subset(train_idx);
        eval_parts[static_cast<size_t>(f)] = data.subset(fold_rows[static_cast<size_t>(f)]);
    }

    int best_cell = 0;
    for (size_t c = 0; c < cells.size(); ++c) {
        double sum = 0;
        int evaluated = 0;
        for (int f = 0; f < folds; ++f) {
            const Dataset& eval = eval_parts[static_cast<size_t>(f)];
            const std::vector<int> counts = eval.class_counts();
            const long present =
                std::count_if(counts.begin(), counts.end(), [](int v) { return v > 0; });
            if (present < 2) continue;  // AUC undefined on a single-class fold
            TrainConfig tc;
            tc.max_depth = cells[c].depth;
            tc.min_samples_leaf = cells[c].min_leaf;
            DecisionTree tree = train_tree(train_parts[static_cast<size_t>(f)], tc);
            const double a = auc(tree_scores(tree, eval), eval.labels);
            result.fold_auc[c][static_cast<size_t>(f)] = a;
            sum += a;
            ++evaluated;
        }
        if (evaluated > 0) result.mean_auc[c] = sum / evaluated;
        if (result.mean_auc[c] > result.mean_auc[static_cast<size_t>(best_cell)]) {
            best_cell = static_cast<int>(c);
        }
    }
    require_data(std::isfinite(result.mean_auc[static_cast<size_t>(best_cell)]),
                 "cross-validation could not evaluate any fold (single-class folds)");

    result.best_depth = cells[static_cast<size_t>(best_cell)].depth;
    result.best_min_leaf = cells[static_cast<size_t>(best_cell)].min_leaf;
    TrainConfig tc;
    tc.max_depth = result.best_depth;
    tc.min_samples_leaf = result.best_min_leaf;
    result.tree = train_tree(data, tc);
    return result;
}

namespace {

double mean_scaled_distance(const PathSet& mine, const std::vector<PathSet>& refs,
                            const FeatureSpace& space, const DistanceConfig& dcfg) {
    double sum = 0;
    for (const PathSet& ref : refs) sum += path_set_distance(mine, ref, space, dcfg).scaled;
    return sum / static_cast<double>(refs.size());
}

MethodMetrics member_metrics(const CollectionMember& member, const ScoredTree& score,
                             const Dataset& train, const Dataset& holdout) {
    MethodMetrics m;
    m.auc = auc(tree_scores(member.tree, holdout), holdout.labels);
    m.distance = score.distance;
    m.has_distance = true;
    m.depth = score.depth;
    m.nodes = score.nodes;
    m.grid_depth = member.max_depth;
    m.grid_min_leaf = member.min_samples_leaf;
    m.importance = gini_importance(member.tree, train);
    return m;
}

}  // namespace

PipelineResult run_pipeline(const Dataset& data, const PipelineConfig& cfg) {
    cfg.grid.validate();
    if (cfg.repetitions < 1) throw UsageError("repetitions must be >= 1");
    if (!(cfg.holdout_fraction > 0.0 && cfg.holdout_fraction < 1.0))
        throw UsageError("holdout fraction must lie strictly between 0 and 1");
    if (!(cfg.batch_fraction > 0.0 && cfg.batch_fraction < 1.0))
        throw UsageError("batch fraction must lie strictly between 0 and 1");
    if (cfg.cv_folds < 2) throw UsageError("cross-validation requires at least 2 folds");
    if (cfg.forest_trees < 1) throw UsageError("forest size must be >= 1");
    if (!(cfg.epsilon >= 0.0 && cfg.epsilon <= 1.0))
        throw UsageError("epsilon must lie in [0, 1]");
    if (cfg.three_way_split && !(cfg.validation_fraction > 0.0 && cfg.validation_fraction < 1.0))
        throw UsageError("validation fraction must lie strictly between 0 and 1");
    require_data(data.space.num_classes == 2, "the stability pipeline requires a binary label");
    require_data(data.n() >= 10, "the stability pipeline needs at least 10 rows");

    const int grid_max = cfg.grid.max_depth();
    DistanceConfig dcfg;
    dcfg.scale_depth = cfg.scale_depth > 0 ? cfg.scale_depth : grid_max;
    if (dcfg.scale_depth < grid_max)
        throw UsageError("distance scale depth must cover the deepest grid entry");
    dcfg.lambda = cfg.lambda >= 0 ? cfg.lambda : 2.0 * dcfg.scale_depth;

    const int n = data.n();
    const int min_leaf_floor = *std::min_element(cfg.grid.min_leaf_grid.begin(),
                                                 cfg.grid.min_leaf_grid.end());

    PipelineResult out;
    out.cfg = cfg;
    out.dcfg = dcfg;
    out.reps.reserve(static_cast<size_t>(cfg.repetitions));

    int succeeded = 0;
    for (int r = 0; r < cfg.repetitions; ++r) {
        RepetitionResult rep;
        rep.rep = r;
        try {
            std::vector<int> perm(static_cast<size_t>(n));
            std::iota(perm.begin(), perm.end(), 0);
            Rng rng(derive_seed(cfg.seed, {static_cast<uint64_t>(r), 1}));
            std::shuffle(perm.begin(), perm.end(), rng);

            int n_hold = static_cast<int>(std::lround(cfg.holdout_fraction * n));
            n_hold = std::clamp(n_hold, 1, n - 3);
            std::vector<int> hold_idx(perm.begin(), perm.begin() + n_hold);
            std::vector<int> rest_idx(perm.begin() + n_hold, perm.end());

            std::vector<int> val_idx;
            if (cfg.three_way_split) {
                const int n_rest = static_cast<int>(rest_idx.size());
                int n_val = static_cast<int>(std::lround(cfg.validation_fraction * n_rest));
                n_val = std::clamp(n_val, 1, n_rest - 2);
                val_idx.assign(rest_idx.begin(), rest_idx.begin() + n_val);
                rest_idx.erase(rest_idx.begin(), rest_idx.begin() + n_val);
            }
            std::vector<int> train_idx = rest_idx;
            const int n_train = static_cast<int>(train_idx.size());

            int n_batch0 = static_cast<int>(std::lround(cfg.batch_fraction * n_train));
            n_batch0 = std::clamp(n_batch0, 1, n_train - 1);
            std::vector<int> batch0_idx(train_idx.begin(), train_idx.begin() + n_batch0);

            Dataset holdout = data.subset(hold_idx);
            Dataset train = data.subset(train_idx);
            Dataset batch0 = data.subset(batch0_idx);
            Dataset scoring = cfg.three_way_split ? data.subset(val_idx) : holdout;

            {
                std::vector<int> h = holdout.row_ids, t = train.row_ids, s = scoring.row_ids;
                std::sort(h.begin(), h.end());
                std::sort(t.begin(), t.end());
                std::sort(s.begin(), s.end());
                std::vector<int> overlap;
                std::set_intersection(h.begin(), h.end(), t.begin(), t.end(),
                                      std::back_inserter(overlap));
                require(overlap.empty(), "holdout and training rows overlap");
                overlap.clear();
                std::set_intersection(s.begin(), s.end(), t.begin(), t.end(),
                                      std::back_inserter(overlap));
                require(overlap.empty(), "scoring and training rows overlap");
            }

            const std::vector<int> hold_counts = holdout.class_counts();
            require_data(hold_counts[0] > 0 && hold_counts[1] > 0,
                         "holdout split contains a single class");
            const std::vector<int> score_counts = scoring.class_counts();
            require_data(score_counts[0] > 0 && score_counts[1] > 0,
                         "scoring split contains a single class");

            std::vector<CollectionMember> reference = build_collection(
                batch0, cfg.grid, derive_seed(cfg.seed, {static_cast<uint64_t>(r), 2}),
                cfg.threads);
            std::vector<CollectionMember> candidates = build_collection(
                train, cfg.grid, derive_seed(cfg.seed, {static_cast<uint64_t>(r), 3}),
                cfg.threads);

            {
                std::vector<int> b0 = batch0.row_ids, tr = train.row_ids;
                std::sort(b0.begin(), b0.end());
                std::sort(tr.begin(), tr.end());
                for (const CollectionMember& m : reference)
                    for (int row : m.sample_rows)
                        require(std::binary_search(b0.begin(), b0.end(), row),
                                "reference bootstrap drew a row outside its batch");
                for (const CollectionMember& m : candidates)
                    for (int row : m.sample_rows)
                        require(std::binary_search(tr.begin(), tr.end(), row),
                                "candidate bootstrap drew a row outside the training split");
            }

            rep.scored =
                score_collection(candidates, reference, scoring, data.space, dcfg, cfg.threads);
            rep.frontier = pareto_frontier(rep.scored, cfg.three_objectives);

            const Selection sel_auc = select_tree(rep.scored, rep.frontier, SelectionRule::MaxAuc);
            const Selection sel_dist =
                select_tree(rep.scored, rep.frontier, SelectionRule::MinDistance);
            rep.selected = select_tree(rep.scored, rep.frontier, cfg.selection, cfg.epsilon);

            auto metrics_for = [&](int scored_index) {
                const ScoredTree& s = rep.scored[static_cast<size_t>(scored_index)];
                return member_metrics(candidates[static_cast<size_t>(s.index)], s, train, holdout);
            };
            rep.pareto_auc = metrics_for(sel_auc.scored_index);
            rep.pareto_distance = metrics_for(sel_dist.scored_index);
            rep.selected_tree = metrics_for(rep.selected.scored_index);

            std::vector<PathSet> ref_paths(reference.size());
            for (size_t i = 0; i < reference.size(); ++i)
                ref_paths[i] = extract_paths(reference[i].tree, data.space);

            CvResult cv = cv_baseline(train, cfg.grid, cfg.cv_folds,
                                      derive_seed(cfg.seed, {static_cast<uint64_t>(r), 4}));
            rep.cv.auc = auc(tree_scores(cv.tree, holdout), holdout.labels);
            rep.cv.distance = mean_scaled_distance(extract_paths(cv.tree, data.space), ref_paths,
                                                   data.space, dcfg);
            rep.cv.has_distance = true;
            rep.cv.depth = cv.tree.depth();
            rep.cv.nodes = cv.tree.node_count();
            rep.cv.grid_depth = cv.best_depth;
            rep.cv.grid_min_leaf = cv.best_min_leaf;
            rep.cv.importance = gini_importance(cv.tree, train);

            ForestConfig fc;
            fc.n_trees = cfg.forest_trees;
            fc.max_depth = grid_max;
            fc.min_samples_leaf = min_leaf_floor;
            fc.bootstrap = true;
            fc.feature_subsample = -1;
            fc.seed = derive_seed(cfg.seed, {static_cast<uint64_t>(r), 5});
            Forest forest = train_forest(train, fc);
            rep.forest.auc = auc(forest_scores(forest, holdout), holdout.labels);
            rep.forest.distance = 0;
            rep.forest.has_distance = false;
            size_t largest = 0;
            for (size_t t = 1; t < forest.trees.size(); ++t)
                if (forest.trees[t].node_count() > forest.trees[largest].node_count()) largest = t;
            rep.forest.depth = forest.trees[largest].depth();
            rep.forest.nodes = forest.trees[largest].node_count();
            rep.forest.grid_depth = fc.max_depth;
            rep.forest.grid_min_leaf = fc.min_samples_leaf;
            rep.forest.importance = forest_importance(forest, train);
            ++succeeded;
        } catch (const DataError& e) {
            rep.failed = true;
            rep.failure = e.what();
        }
        out.reps.push_back(std::move(rep));
    }
    require_data(succeeded > 0, "every pipeline repetition failed degenerately");
    return out;
}

}  // namespace treestab
