#include <doctest.h>

#include "generators.hpp"
#include "treestab/errors.hpp"
#include "treestab/paths.hpp"
#include "treestab/tree.hpp"
#include "treestab/tree_io.hpp"

using namespace treestab;

namespace {

FeatureSpace one_numeric(double lo = 0.0, double hi = 10.0) {
    FeatureSpace s;
    Feature f;
    f.kind = FeatureKind::Numeric;
    f.name = "x0";
    f.lower = lo;
    f.upper = hi;
    s.features.push_back(f);
    s.num_classes = 2;
    return s;
}

DecisionTree stump(int feature, double threshold, int left_label, int right_label) {
    DecisionTree t;
    t.nodes.push_back(Node::split_numeric(feature, threshold, 1, 2));
    t.nodes.push_back(Node::leaf(left_label));
    t.nodes.push_back(Node::leaf(right_label));
    return t;
}

// Membership consistent with routing: left branch owns its threshold.
bool contains(const TreePath& p, const std::vector<double>& x, const FeatureSpace& space) {
    for (int j = 0; j < space.size(); ++j) {
        const Feature& f = space.features[j];
        if (f.kind == FeatureKind::Numeric) {
            if (x[j] > p.upper[j]) return false;
            bool at_floor = p.lower[j] == f.lower;
            if (at_floor ? x[j] < p.lower[j] : x[j] <= p.lower[j]) return false;
        } else {
            if (!p.masks[j].test(static_cast<int>(x[j]))) return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("mask basics") {
    Mask m(70);
    CHECK(m.count() == 0);
    m.set(0);
    m.set(69);
    CHECK(m.count() == 2);
    CHECK(m.test(69));
    CHECK_FALSE(m.test(1));
    Mask f = Mask::full(70);
    CHECK(f.is_full());
    CHECK(f.xor_count(m) == 68);
    CHECK(f.minus(m).count() == 68);
    CHECK(f.intersect(m) == m);
    m.reset(69);
    CHECK(m.count() == 1);
    CHECK(m.to_indices() == std::vector<int>{0});
}

TEST_CASE("feature space validation and digest") {
    FeatureSpace s = one_numeric();
    CHECK_NOTHROW(s.validate());
    std::string d1 = s.digest();
    CHECK(d1.size() == 16);
    CHECK(s.digest() == d1);

    FeatureSpace s2 = one_numeric(0.0, 11.0);
    CHECK(s2.digest() != d1);

    FeatureSpace bad = one_numeric(5.0, 5.0);
    CHECK_THROWS_AS(bad.validate(), DataError);

    FeatureSpace cat;
    Feature f;
    f.kind = FeatureKind::Categorical;
    f.cardinality = 1;
    cat.features.push_back(f);
    CHECK_THROWS_AS(cat.validate(), DataError);
}

TEST_CASE("classify routes the boundary value left") {
    FeatureSpace s = one_numeric();
    DecisionTree t = stump(0, 4.0, 0, 1);
    CHECK(t.classify(std::vector<double>{4.0}, s) == 0);
    CHECK(t.classify(std::vector<double>{4.0000001}, s) == 1);
    CHECK(t.classify(std::vector<double>{0.0}, s) == 0);
    CHECK(t.classify(std::vector<double>{10.0}, s) == 1);
}

TEST_CASE("depth and node count") {
    FeatureSpace s = one_numeric();
    DecisionTree leaf;
    leaf.nodes.push_back(Node::leaf(0));
    CHECK(leaf.depth() == 0);
    CHECK(leaf.node_count() == 1);

    // complete depth-2 tree: 3 splits, 4 leaves
    DecisionTree t;
    t.nodes.push_back(Node::split_numeric(0, 5.0, 1, 2));
    t.nodes.push_back(Node::split_numeric(0, 2.0, 3, 4));
    t.nodes.push_back(Node::split_numeric(0, 8.0, 5, 6));
    for (int k = 0; k < 4; ++k) t.nodes.push_back(Node::leaf(k % 2));
    CHECK(t.depth() == 2);
    CHECK(t.node_count() == 7);
    CHECK_NOTHROW(t.validate(s));
}

TEST_CASE("validate rejects malformed trees") {
    FeatureSpace s = one_numeric();

    DecisionTree dangling;
    dangling.nodes.push_back(Node::split_numeric(0, 5.0, 1, 5));
    dangling.nodes.push_back(Node::leaf(0));
    CHECK_THROWS_AS(dangling.validate(s), DataError);

    DecisionTree unreachable = stump(0, 5.0, 0, 1);
    unreachable.nodes.push_back(Node::leaf(1));
    CHECK_THROWS_AS(unreachable.validate(s), DataError);

    DecisionTree shared;
    shared.nodes.push_back(Node::split_numeric(0, 5.0, 1, 1));
    shared.nodes.push_back(Node::leaf(0));
    CHECK_THROWS_AS(shared.validate(s), DataError);

    DecisionTree bad_threshold = stump(0, 11.0, 0, 1);
    CHECK_THROWS_AS(bad_threshold.validate(s), DataError);

    DecisionTree bad_label = stump(0, 5.0, 0, 7);
    CHECK_THROWS_AS(bad_label.validate(s), DataError);

    FeatureSpace cs;
    Feature f;
    f.kind = FeatureKind::Categorical;
    f.name = "c";
    f.cardinality = 3;
    cs.features.push_back(f);
    cs.num_classes = 2;
    DecisionTree full_subset;
    full_subset.nodes.push_back(Node::split_categorical(0, Mask::full(3), 1, 2));
    full_subset.nodes.push_back(Node::leaf(0));
    full_subset.nodes.push_back(Node::leaf(1));
    CHECK_THROWS_AS(full_subset.validate(cs), DataError);
}

TEST_CASE("extract_paths on a depth-1 split") {
    FeatureSpace s = one_numeric();
    Feature extra;
    extra.kind = FeatureKind::Numeric;
    extra.name = "x1";
    extra.lower = -1.0;
    extra.upper = 1.0;
    s.features.push_back(extra);

    DecisionTree t = stump(0, 4.0, 0, 1);
    PathSet ps = extract_paths(t, s);
    CHECK(ps.size() == 2);
    CHECK(ps.source_depth == 1);

    CHECK(ps.paths[0].lower[0] == 0.0);
    CHECK(ps.paths[0].upper[0] == 4.0);
    CHECK(ps.paths[0].label == 0);
    CHECK(ps.paths[1].lower[0] == 4.0);
    CHECK(ps.paths[1].upper[0] == 10.0);
    CHECK(ps.paths[1].label == 1);

    // untouched feature stays at full range
    CHECK(ps.paths[0].lower[1] == -1.0);
    CHECK(ps.paths[0].upper[1] == 1.0);
    CHECK_FALSE(ps.paths[0].restricted_numeric(1, s));
    CHECK(ps.paths[0].restricted_numeric(0, s));
}

TEST_CASE("extract_paths rejects region-emptying splits") {
    FeatureSpace s = one_numeric();
    DecisionTree t;
    t.nodes.push_back(Node::split_numeric(0, 7.0, 1, 2));
    t.nodes.push_back(Node::leaf(0));
    t.nodes.push_back(Node::split_numeric(0, 5.0, 3, 4));  // region is (7,10]
    t.nodes.push_back(Node::leaf(0));
    t.nodes.push_back(Node::leaf(1));
    CHECK_THROWS_AS(extract_paths(t, s), DataError);
}

TEST_CASE("paths partition the space") {
    Rng rng(20260814ull);
    for (int rep = 0; rep < 200; ++rep) {
        FeatureSpace space = testgen::random_space(rng);
        DecisionTree tree = testgen::random_tree(space, rng, 5);
        PathSet ps = extract_paths(tree, space);
        for (int k = 0; k < 50; ++k) {
            std::vector<double> x = testgen::random_point(space, rng);
            int hits = 0;
            int hit_leaf = -1;
            for (const TreePath& p : ps.paths) {
                if (contains(p, x, space)) {
                    ++hits;
                    hit_leaf = p.leaf;
                }
            }
            REQUIRE(hits == 1);
            REQUIRE(hit_leaf == tree.descend(x, space));
        }
    }
}

TEST_CASE("tree document round trip") {
    Rng rng(7ull);
    for (int rep = 0; rep < 50; ++rep) {
        FeatureSpace space = testgen::random_space(rng);
        DecisionTree tree = testgen::random_tree(space, rng, 4);
        nlohmann::json doc = serialize_tree(tree, space);
        TreeDocument parsed = parse_tree(doc);
        nlohmann::json again = serialize_tree(parsed.tree, parsed.space);
        REQUIRE(doc == again);
        REQUIRE(doc.dump(2) == again.dump(2));
        REQUIRE(parsed.space_digest == space.digest());
    }
}

TEST_CASE("tree document parse errors name the offending node") {
    FeatureSpace s = one_numeric();
    DecisionTree t = stump(0, 4.0, 0, 1);
    nlohmann::json good = serialize_tree(t, s);

    nlohmann::json bad = good;
    bad["space_digest"] = "0000000000000000";
    CHECK_THROWS_AS(parse_tree(bad), DataError);

    bad = good;
    bad["depth"] = 3;
    CHECK_THROWS_AS(parse_tree(bad), DataError);

    bad = good;
    bad["nodes"][1].erase("label");
    try {
        parse_tree(bad);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("nodes[1]") != std::string::npos);
    }

    bad = good;
    bad["nodes"][0]["kind"] = "oblique";
    CHECK_THROWS_AS(parse_tree(bad), DataError);

    bad = good;
    bad["nodes"][0]["threshold"] = 99.0;
    CHECK_THROWS_AS(parse_tree(bad), DataError);
}

TEST_CASE("distribution checks on leaves") {
    FeatureSpace s = one_numeric();
    DecisionTree t;
    t.nodes.push_back(Node::leaf(0, {0.7, 0.3}, 10));
    CHECK_NOTHROW(t.validate(s));
    t.nodes[0].distribution = {0.7, 0.7};
    CHECK_THROWS_AS(t.validate(s), DataError);
    t.nodes[0].distribution = {0.7};
    CHECK_THROWS_AS(t.validate(s), DataError);
}
