#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "treestab/errors.hpp"
#include "treestab/stability.hpp"
#include "treestab/util.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace treestab;

namespace {

std::vector<ScoredTree> as_scored(const std::vector<oracle::Point2>& pts) {
    std::vector<ScoredTree> s(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) {
        s[i].index = static_cast<int>(i);
        s[i].distance = pts[i].d;
        s[i].auc = pts[i].alpha;
        s[i].nodes = 1;
    }
    return s;
}

Dataset synthetic_binary(int n, uint64_t seed) {
    FeatureSpace space;
    for (int j = 0; j < 3; ++j) {
        Feature f;
        f.kind = FeatureKind::Numeric;
        f.name = "x" + std::to_string(j);
        f.lower = 0.0;
        f.upper = 1.0;
        space.features.push_back(f);
    }
    space.num_classes = 2;
    space.class_names = {"neg", "pos"};
    space.validate();

    Dataset d;
    d.space = space;
    Rng rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
        std::vector<double> row = {unif(rng), unif(rng), unif(rng)};
        // noisy linear rule on the first two coordinates
        const double score = row[0] + 0.5 * row[1] + 0.25 * (unif(rng) - 0.5);
        d.rows.push_back(row);
        d.labels.push_back(score > 0.75 ? 1 : 0);
        d.row_ids.push_back(i);
    }
    return d;
}

}  // namespace

TEST_CASE("pareto frontier matches a literal dominance filter") {
    Rng rng(424242);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 60);
        std::vector<oracle::Point2> pts;
        pts.reserve(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            // coarse grid so ties and duplicates occur often
            const double d = std::floor(unif(rng) * 8) / 8.0;
            const double a = std::floor(unif(rng) * 8) / 8.0;
            pts.push_back({d, a});
        }
        // inject exact duplicates
        if (n > 2) pts[static_cast<size_t>(n - 1)] = pts[0];

        std::vector<int> want = oracle::dominance_filter(pts);
        std::vector<int> got = pareto_frontier(as_scored(pts), false);
        std::sort(got.begin(), got.end());
        std::sort(want.begin(), want.end());
        REQUIRE(got == want);
    }
}

TEST_CASE("three-objective frontier matches a literal dominance filter") {
    Rng rng(515151);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 400; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 40);
        std::vector<oracle::Point3> pts;
        std::vector<ScoredTree> scored(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            oracle::Point3 p;
            p.d = std::floor(unif(rng) * 6) / 6.0;
            p.alpha = std::floor(unif(rng) * 6) / 6.0;
            p.nodes = static_cast<double>(1 + rng() % 5);
            pts.push_back(p);
            scored[static_cast<size_t>(i)].index = i;
            scored[static_cast<size_t>(i)].distance = p.d;
            scored[static_cast<size_t>(i)].auc = p.alpha;
            scored[static_cast<size_t>(i)].nodes = static_cast<long>(p.nodes);
        }
        std::vector<int> want = oracle::dominance_filter3(pts);
        std::vector<int> got = pareto_frontier(scored, true);
        std::sort(got.begin(), got.end());
        std::sort(want.begin(), want.end());
        REQUIRE(got == want);
    }
}

TEST_CASE("duplicate coordinate vectors all stay on the frontier") {
    std::vector<ScoredTree> scored = as_scored({{0.1, 0.8}, {0.2, 0.9}, {0.1, 0.8}});
    std::vector<int> got = pareto_frontier(scored, false);
    std::sort(got.begin(), got.end());
    CHECK(got == std::vector<int>{0, 1, 2});

    // a strictly better point removes both copies
    scored = as_scored({{0.1, 0.8}, {0.05, 0.9}, {0.1, 0.8}});
    CHECK(pareto_frontier(scored, false) == std::vector<int>{1});
}

TEST_CASE("frontier output is ordered by rising distance") {
    std::vector<ScoredTree> scored =
        as_scored({{0.5, 1.0}, {0.1, 0.6}, {0.3, 0.9}, {0.2, 0.7}, {0.4, 0.95}});
    std::vector<int> got = pareto_frontier(scored, false);
    REQUIRE(got.size() == 5);
    for (size_t i = 1; i < got.size(); ++i)
        CHECK(scored[static_cast<size_t>(got[i - 1])].distance <
              scored[static_cast<size_t>(got[i])].distance);
}

TEST_CASE("selection rules pick the documented frontier members") {
    std::vector<ScoredTree> scored = as_scored({{0.1, 0.8}, {0.2, 0.9}});
    std::vector<int> frontier = {0, 1};

    CHECK(select_tree(scored, frontier, SelectionRule::MaxAuc).scored_index == 1);
    CHECK(select_tree(scored, frontier, SelectionRule::MinDistance).scored_index == 0);

    SUBCASE("epsilon wide enough admits the more stable tree") {
        Selection s = select_tree(scored, frontier, SelectionRule::EpsilonConstrained, 0.2);
        CHECK(s.scored_index == 0);  // floor 0.72, both qualify, smaller distance wins
        CHECK_FALSE(s.fallback);
    }
    SUBCASE("tight epsilon keeps only the top-AUC tree") {
        Selection s = select_tree(scored, frontier, SelectionRule::EpsilonConstrained, 0.05);
        CHECK(s.scored_index == 1);  // floor 0.855 excludes the 0.8 tree
        CHECK_FALSE(s.fallback);
    }
    SUBCASE("balanced objective ties break toward lower distance") {
        // (-0.1+0.8)/2 == (-0.2+0.9)/2 == 0.35
        CHECK(select_tree(scored, frontier, SelectionRule::Balanced).scored_index == 0);
    }
    SUBCASE("exact duplicates tie toward the lower index") {
        std::vector<ScoredTree> dup = as_scored({{0.1, 0.8}, {0.1, 0.8}});
        std::vector<int> f2 = {0, 1};
        CHECK(select_tree(dup, f2, SelectionRule::MaxAuc).scored_index == 0);
        CHECK(select_tree(dup, f2, SelectionRule::Balanced).scored_index == 0);
    }
    SUBCASE("epsilon zero still admits the argmax itself") {
        Selection s = select_tree(scored, frontier, SelectionRule::EpsilonConstrained, 0.0);
        CHECK(s.scored_index == 1);
        CHECK_FALSE(s.fallback);
    }
}

TEST_CASE("cross-validation picks a winning cell and refits on all rows") {
    // perfectly separable in one dimension
    FeatureSpace space;
    Feature f;
    f.kind = FeatureKind::Numeric;
    f.name = "x";
    f.lower = 0.0;
    f.upper = 100.0;
    space.features.push_back(f);
    space.num_classes = 2;
    space.class_names = {"a", "b"};
    space.validate();
    Dataset d;
    d.space = space;
    for (int i = 0; i < 60; ++i) {
        d.rows.push_back({static_cast<double>(i) + (i >= 30 ? 10.0 : 0.0)});
        d.labels.push_back(i < 30 ? 0 : 1);
        d.row_ids.push_back(i);
    }

    GridConfig grid;
    grid.depth_grid = {1, 2};
    grid.min_leaf_grid = {1, 5};
    CvResult cv = cv_baseline(d, grid, 5, 99);

    REQUIRE(cv.mean_auc.size() == 4);
    REQUIRE(cv.fold_auc.size() == 4);
    for (const auto& row : cv.fold_auc) CHECK(row.size() == 5);
    // all cells separate this data perfectly; the tie must fall to the first cell
    for (double m : cv.mean_auc) CHECK(m == doctest::Approx(1.0));
    CHECK(cv.best_depth == 1);
    CHECK(cv.best_min_leaf == 1);
    CHECK(cv.tree.depth() == 1);
    for (int i = 0; i < d.n(); ++i)
        CHECK(cv.tree.classify(d.rows[i], space) == d.labels[i]);

    SUBCASE("deterministic for a fixed seed") {
        CvResult again = cv_baseline(d, grid, 5, 99);
        CHECK(again.mean_auc == cv.mean_auc);
        CHECK(again.fold_auc == cv.fold_auc);
    }
    SUBCASE("usage errors") {
        CHECK_THROWS_AS(cv_baseline(d, grid, 1, 99), UsageError);
        GridConfig empty;
        empty.depth_grid = {};
        CHECK_THROWS_AS(cv_baseline(d, empty, 5, 99), UsageError);
    }
}

TEST_CASE("collections cover the whole grid with per-member bootstraps") {
    Dataset d = synthetic_binary(80, 11);
    GridConfig grid;
    grid.depth_grid = {2, 3};
    grid.min_leaf_grid = {2, 5};
    grid.bootstraps_per_cell = 2;
    std::vector<CollectionMember> members = build_collection(d, grid, 5, 1);
    REQUIRE(static_cast<int>(members.size()) == grid.size());

    std::set<std::tuple<int, int, int>> seen;
    for (const CollectionMember& m : members) {
        seen.insert({m.max_depth, m.min_samples_leaf, m.bootstrap_index});
        CHECK(m.tree.depth() <= m.max_depth);
        CHECK(static_cast<int>(m.sample_rows.size()) == d.n());
        for (int row : m.sample_rows) {
            CHECK(row >= 0);
            CHECK(row < d.n());
        }
    }
    CHECK(seen.size() == members.size());  // every grid point exactly once

    SUBCASE("worker count does not change the result") {
        std::vector<CollectionMember> again = build_collection(d, grid, 5, 3);
        REQUIRE(again.size() == members.size());
        for (size_t i = 0; i < members.size(); ++i) {
            CHECK(again[i].sample_rows == members[i].sample_rows);
            CHECK(again[i].tree.node_count() == members[i].tree.node_count());
        }
    }
}

TEST_CASE("scoring reports distances in [0,1] and holdout AUC") {
    Dataset d = synthetic_binary(120, 21);
    std::vector<int> train_idx, hold_idx;
    for (int i = 0; i < d.n(); ++i) (i < 80 ? train_idx : hold_idx).push_back(i);
    Dataset train = d.subset(train_idx);
    Dataset hold = d.subset(hold_idx);

    GridConfig grid;
    grid.depth_grid = {2, 4};
    grid.min_leaf_grid = {2, 8};
    std::vector<CollectionMember> reference = build_collection(train, grid, 1, 1);
    std::vector<CollectionMember> candidates = build_collection(train, grid, 2, 1);

    DistanceConfig dcfg;
    dcfg.scale_depth = 4;
    dcfg.lambda = 8.0;
    std::vector<ScoredTree> scored =
        score_collection(candidates, reference, hold, d.space, dcfg, 1);
    REQUIRE(scored.size() == candidates.size());
    for (size_t i = 0; i < scored.size(); ++i) {
        CHECK(scored[i].index == static_cast<int>(i));
        CHECK(scored[i].distance >= 0.0);
        CHECK(scored[i].distance <= 1.0);
        CHECK(scored[i].auc >= 0.0);
        CHECK(scored[i].auc <= 1.0);
        CHECK(scored[i].nodes == candidates[i].tree.node_count());
        CHECK(scored[i].depth == candidates[i].tree.depth());
    }
    // scoring a collection against itself yields strictly smaller mean distance
    // for each member than a fresh bootstrap collection does on average
    std::vector<ScoredTree> self = score_collection(reference, reference, hold, d.space, dcfg, 1);
    double self_mean = 0, cross_mean = 0;
    for (size_t i = 0; i < self.size(); ++i) {
        self_mean += self[i].distance;
        cross_mean += scored[i].distance;
    }
    CHECK(self_mean / self.size() < cross_mean / scored.size());
}

TEST_CASE("the full pipeline runs, audits itself, and is reproducible") {
    Dataset d = synthetic_binary(90, 33);
    PipelineConfig cfg;
    cfg.grid.depth_grid = {2, 3};
    cfg.grid.min_leaf_grid = {2, 5};
    cfg.grid.bootstraps_per_cell = 2;
    cfg.repetitions = 2;
    cfg.cv_folds = 3;
    cfg.forest_trees = 5;
    cfg.seed = 7;

    PipelineResult result = run_pipeline(d, cfg);
    CHECK(result.dcfg.scale_depth == 3);
    CHECK(result.dcfg.lambda == doctest::Approx(6.0));
    REQUIRE(result.reps.size() == 2);

    for (const RepetitionResult& rep : result.reps) {
        REQUIRE_FALSE(rep.failed);
        REQUIRE(static_cast<int>(rep.scored.size()) == cfg.grid.size());
        REQUIRE(!rep.frontier.empty());

        // frontier members are mutually non-dominated and include the best AUC
        std::vector<oracle::Point2> pts;
        for (const ScoredTree& s : rep.scored) pts.push_back({s.distance, s.auc});
        std::vector<int> want = oracle::dominance_filter(pts);
        std::vector<int> got = rep.frontier;
        std::sort(got.begin(), got.end());
        CHECK(got == want);

        CHECK(std::find(rep.frontier.begin(), rep.frontier.end(), rep.selected.scored_index) !=
              rep.frontier.end());
        CHECK_FALSE(rep.selected.fallback);

        double best_auc = 0, best_dist = 1e9;
        for (int idx : rep.frontier) {
            best_auc = std::max(best_auc, rep.scored[static_cast<size_t>(idx)].auc);
            best_dist = std::min(best_dist, rep.scored[static_cast<size_t>(idx)].distance);
        }
        CHECK(rep.pareto_auc.auc == doctest::Approx(best_auc));
        CHECK(rep.pareto_distance.distance == doctest::Approx(best_dist));

        for (const MethodMetrics* m :
             {&rep.pareto_auc, &rep.pareto_distance, &rep.selected_tree, &rep.cv, &rep.forest}) {
            CHECK(m->auc >= 0.0);
            CHECK(m->auc <= 1.0);
            CHECK(m->nodes >= 1);
            CHECK(m->depth >= 0);
            REQUIRE(m->importance.size() == static_cast<size_t>(d.space.size()));
            double sum = 0;
            for (double v : m->importance) {
                CHECK(v >= 0.0);
                sum += v;
            }
            CHECK((std::abs(sum - 1.0) < 1e-9 || sum == 0.0));
        }
        CHECK(rep.cv.has_distance);
        CHECK(rep.cv.distance >= 0.0);
        CHECK(rep.cv.distance <= 1.0);
        CHECK_FALSE(rep.forest.has_distance);
    }

    PipelineResult again = run_pipeline(d, cfg);
    for (size_t r = 0; r < result.reps.size(); ++r) {
        for (size_t i = 0; i < result.reps[r].scored.size(); ++i) {
            CHECK(again.reps[r].scored[i].distance == result.reps[r].scored[i].distance);
            CHECK(again.reps[r].scored[i].auc == result.reps[r].scored[i].auc);
        }
        CHECK(again.reps[r].frontier == result.reps[r].frontier);
        CHECK(again.reps[r].selected.scored_index == result.reps[r].selected.scored_index);
    }
}

TEST_CASE("three-way split mode scores candidates on a separate validation slice") {
    Dataset d = synthetic_binary(150, 91);
    PipelineConfig cfg;
    cfg.grid.depth_grid = {2, 3};
    cfg.grid.min_leaf_grid = {3};
    cfg.grid.bootstraps_per_cell = 2;
    cfg.repetitions = 2;
    cfg.cv_folds = 3;
    cfg.forest_trees = 3;
    cfg.seed = 19;
    cfg.three_way_split = true;

    PipelineResult result = run_pipeline(d, cfg);
    REQUIRE(result.reps.size() == 2);
    for (const RepetitionResult& rep : result.reps) {
        REQUIRE_FALSE(rep.failed);
        REQUIRE(!rep.frontier.empty());
        // the reported AUC comes from the holdout, not from the scoring slice,
        // so it need not equal the scored alpha of the same tree
        CHECK(rep.pareto_auc.auc >= 0.0);
        CHECK(rep.pareto_auc.auc <= 1.0);
    }

    PipelineConfig bad = cfg;
    bad.validation_fraction = 0.0;
    CHECK_THROWS_AS(run_pipeline(d, bad), UsageError);
}

TEST_CASE("pipeline configuration is validated up front") {
    Dataset d = synthetic_binary(40, 3);
    PipelineConfig cfg;
    cfg.grid.depth_grid = {2};
    cfg.grid.min_leaf_grid = {2};
    cfg.repetitions = 1;
    cfg.cv_folds = 2;
    cfg.forest_trees = 2;

    PipelineConfig bad = cfg;
    bad.scale_depth = 1;  // below the deepest grid entry
    CHECK_THROWS_AS(run_pipeline(d, bad), UsageError);
    bad = cfg;
    bad.holdout_fraction = 1.5;
    CHECK_THROWS_AS(run_pipeline(d, bad), UsageError);
    bad = cfg;
    bad.epsilon = 2.0;
    CHECK_THROWS_AS(run_pipeline(d, bad), UsageError);
    bad = cfg;
    bad.repetitions = 0;
    CHECK_THROWS_AS(run_pipeline(d, bad), UsageError);

    // a three-class label is rejected
    Dataset multi = d;
    multi.space.num_classes = 3;
    multi.space.class_names = {"a", "b", "c"};
    CHECK_THROWS_AS(run_pipeline(multi, cfg), DataError);
}
