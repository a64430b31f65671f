#include "treestab/cart.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "treestab/errors.hpp"

namespace treestab {

namespace {

constexpr double kMinGain = 1e-12;

double gini_from_counts(const std::vector<long>& counts, long n) {
    if (n == 0) return 0.0;
    double g = 1.0;
    for (long c : counts) {
        double p = static_cast<double>(c) / static_cast<double>(n);
        g -= p * p;
    }
    return g;
}

struct SplitChoice {
    bool found = false;
    double gain = 0.0;
    int feature = -1;
    bool categorical = false;
    double threshold = 0.0;
    int category = -1;
};

struct Builder {
    const Dataset& data;
    const TrainConfig& cfg;
    Rng rng;
    DecisionTree tree;
    int K;
    int P;

    Builder(const Dataset& d, const TrainConfig& c)
        : data(d), cfg(c), rng(c.seed), K(d.space.num_classes), P(d.space.size()) {}

    std::vector<int> features_for_node() {
        std::vector<int> feats(P);
        std::iota(feats.begin(), feats.end(), 0);
        if (cfg.feature_subsample <= 0 || cfg.feature_subsample >= P) return feats;
        for (int i = 0; i < cfg.feature_subsample; ++i) {
            int j = std::uniform_int_distribution<int>(i, P - 1)(rng);
            std::swap(feats[i], feats[j]);
        }
        feats.resize(cfg.feature_subsample);
        std::sort(feats.begin(), feats.end());
        return feats;
    }

    SplitChoice best_split(const std::vector<int>& idx, const std::vector<long>& counts) {
        const long n = static_cast<long>(idx.size());
        const double g_parent = gini_from_counts(counts, n);
        const long m = cfg.min_samples_leaf;
        SplitChoice best;

        std::vector<std::pair<double, int>> vals;
        std::vector<long> left(K), right(K);

        for (int j : features_for_node()) {
            const Feature& f = data.space.features[j];
            if (f.kind == FeatureKind::Numeric) {
                vals.clear();
                vals.reserve(idx.size());
                for (int i : idx) vals.emplace_back(data.rows[i][j], data.labels[i]);
                std::sort(vals.begin(), vals.end(),
                          [](const auto& a, const auto& b) { return a.first < b.first; });
                std::fill(left.begin(), left.end(), 0);
                right.assign(counts.begin(), counts.end());
                for (long i = 0; i + 1 < n; ++i) {
                    ++left[vals[i].second];
                    --right[vals[i].second];
                    if (vals[i].first == vals[i + 1].first) continue;
                    long nl = i + 1, nr = n - nl;
                    if (nl < m || nr < m) continue;
                    double t = (vals[i].first + vals[i + 1].first) / 2.0;
                    if (t <= vals[i].first || t >= vals[i + 1].first) continue;
                    double gain = g_parent -
                                  (static_cast<double>(nl) * gini_from_counts(left, nl) +
                                   static_cast<double>(nr) * gini_from_counts(right, nr)) /
                                      static_cast<double>(n);
                    if (gain > best.gain + kMinGain ||
                        (!best.found && gain > kMinGain)) {
                        best.found = true;
                        best.gain = gain;
                        best.feature = j;
                        best.categorical = false;
                        best.threshold = t;
                    }
                }
            } else {
                std::vector<long> per_cat(f.cardinality, 0);
                std::vector<long> per_cat_class(static_cast<std::size_t>(f.cardinality) * K, 0);
                for (int i : idx) {
                    int c = static_cast<int>(data.rows[i][j]);
                    ++per_cat[c];
                    ++per_cat_class[static_cast<std::size_t>(c) * K + data.labels[i]];
                }
                for (int c = 0; c < f.cardinality; ++c) {
                    long nl = per_cat[c], nr = n - nl;
                    if (nl < m || nr < m || nl == 0 || nr == 0) continue;
                    for (int k = 0; k < K; ++k) {
                        left[k] = per_cat_class[static_cast<std::size_t>(c) * K + k];
                        right[k] = counts[k] - left[k];
                    }
                    double gain = g_parent -
                                  (static_cast<double>(nl) * gini_from_counts(left, nl) +
                                   static_cast<double>(nr) * gini_from_counts(right, nr)) /
                                      static_cast<double>(n);
                    if (gain > best.gain + kMinGain ||
                        (!best.found && gain > kMinGain)) {
                        best.found = true;
                        best.gain = gain;
                        best.feature = j;
                        best.categorical = true;
                        best.category = c;
                    }
                }
            }
        }
        return best;
    }

    int make_leaf(const std::vector<long>& counts, long n) {
        int label = 0;
        for (int k = 1; k < K; ++k)
            if (counts[k] > counts[label]) label = k;
        std::vector<double> dist(K);
        for (int k = 0; k < K; ++k)
            dist[k] = static_cast<double>(counts[k]) / static_cast<double>(n);
        int id = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(Node::leaf(label, std::move(dist), n));
        return id;
    }

    int build(const std::vector<int>& idx, int depth) {
        const long n = static_cast<long>(idx.size());
        require(n > 0, "train_tree: empty node");
        std::vector<long> counts(K, 0);
        for (int i : idx) ++counts[data.labels[i]];

        bool pure = false;
        for (int k = 0; k < K; ++k)
            if (counts[k] == n) pure = true;

        if (pure || depth >= cfg.max_depth || n < 2L * cfg.min_samples_leaf)
            return make_leaf(counts, n);

        SplitChoice ch = best_split(idx, counts);
        if (!ch.found) return make_leaf(counts, n);

        std::vector<int> li, ri;
        const Feature& f = data.space.features[ch.feature];
        for (int i : idx) {
            bool goes_left;
            if (f.kind == FeatureKind::Numeric)
                goes_left = data.rows[i][ch.feature] <= ch.threshold;
            else
                goes_left = static_cast<int>(data.rows[i][ch.feature]) == ch.category;
            (goes_left ? li : ri).push_back(i);
        }
        require(!li.empty() && !ri.empty(), "train_tree: degenerate split");

        int id = static_cast<int>(tree.nodes.size());
        if (f.kind == FeatureKind::Numeric) {
            tree.nodes.push_back(Node::split_numeric(ch.feature, ch.threshold, -1, -1));
        } else {
            Mask go_left(f.cardinality);
            go_left.set(ch.category);
            tree.nodes.push_back(Node::split_categorical(ch.feature, go_left, -1, -1));
        }
        int l = build(li, depth + 1);
        int r = build(ri, depth + 1);
        tree.nodes[id].left = l;
        tree.nodes[id].right = r;
        return id;
    }
};

}  // namespace

DecisionTree train_tree(const Dataset& data, const TrainConfig& cfg) {
    require_data(data.n() > 0, "train_tree: empty dataset");
    require_data(cfg.max_depth >= 0, "train_tree: negative max depth");
    require_data(cfg.min_samples_leaf >= 1, "train_tree: min_samples_leaf must be >= 1");
    data.space.validate();
    Builder b(data, cfg);
    std::vector<int> idx(data.n());
    std::iota(idx.begin(), idx.end(), 0);
    b.build(idx, 0);
    b.tree.validate(data.space);
    require(b.tree.depth() <= cfg.max_depth, "train_tree: depth constraint violated");
    return std::move(b.tree);
}

BootstrapSample bootstrap_sample(const Dataset& data, Rng& rng) {
    require_data(data.n() > 0, "bootstrap_sample: empty dataset");
    BootstrapSample out;
    out.indices.reserve(data.n());
    std::uniform_int_distribution<int> pick(0, data.n() - 1);
    for (int i = 0; i < data.n(); ++i) out.indices.push_back(pick(rng));
    out.data = data.subset(out.indices);
    return out;
}

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    require_data(scores.size() == labels.size(), "auc: size mismatch");
    const std::size_t n = scores.size();
    long npos = 0, nneg = 0;
    for (int y : labels) {
        require_data(y == 0 || y == 1, "auc: labels must be binary");
        if (y == 1)
            ++npos;
        else
            ++nneg;
    }
    require_data(npos > 0 && nneg > 0, "auc: needs both classes in the evaluation set");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        double midrank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k)
            if (labels[order[k]] == 1) rank_sum_pos += midrank;
        i = j + 1;
    }
    double u = rank_sum_pos - static_cast<double>(npos) * (static_cast<double>(npos) + 1.0) / 2.0;
    return u / (static_cast<double>(npos) * static_cast<double>(nneg));
}

std::vector<double> tree_scores(const DecisionTree& tree, const Dataset& data) {
    std::vector<double> s(data.n());
    for (int i = 0; i < data.n(); ++i) {
        const std::vector<double>& dist = tree.leaf_distribution(data.rows[i], data.space);
        require(dist.size() >= 2, "tree_scores: leaf without a class distribution");
        s[i] = dist[1];
    }
    return s;
}

namespace {

void importance_walk(const DecisionTree& tree, const Dataset& data, int id,
                     const std::vector<int>& idx, double inv_total, std::vector<double>& imp) {
    const Node& nd = tree.nodes[id];
    if (nd.kind == Node::Kind::Leaf || idx.empty()) return;

    const int K = data.space.num_classes;
    std::vector<long> counts(K, 0), lc(K, 0), rc(K, 0);
    std::vector<int> li, ri;
    const Feature& f = data.space.features[nd.feature];
    for (int i : idx) {
        ++counts[data.labels[i]];
        bool goes_left;
        if (f.kind == FeatureKind::Numeric)
            goes_left = data.rows[i][nd.feature] <= nd.threshold;
        else
            goes_left = nd.categories.test(static_cast<int>(data.rows[i][nd.feature]));
        if (goes_left) {
            li.push_back(i);
            ++lc[data.labels[i]];
        } else {
            ri.push_back(i);
            ++rc[data.labels[i]];
        }
    }
    const long n = static_cast<long>(idx.size());
    double dec = gini_from_counts(counts, n) -
                 (static_cast<double>(li.size()) * gini_from_counts(lc, li.size()) +
                  static_cast<double>(ri.size()) * gini_from_counts(rc, ri.size())) /
                     static_cast<double>(n);
    imp[nd.feature] += static_cast<double>(n) * inv_total * dec;
    importance_walk(tree, data, nd.left, li, inv_total, imp);
    importance_walk(tree, data, nd.right, ri, inv_total, imp);
}

}  // namespace

std::vector<double> gini_importance(const DecisionTree& tree, const Dataset& data) {
    require_data(data.n() > 0, "gini_importance: empty dataset");
    std::vector<double> imp(data.space.size(), 0.0);
    std::vector<int> idx(data.n());
    std::iota(idx.begin(), idx.end(), 0);
    importance_walk(tree, data, 0, idx, 1.0 / data.n(), imp);
    double s = std::accumulate(imp.begin(), imp.end(), 0.0);
    if (s > 0)
        for (double& v : imp) v /= s;
    return imp;
}

std::pair<int, long> interpretability_metrics(const DecisionTree& tree) {
    return {tree.depth(), tree.node_count()};
}

Forest train_forest(const Dataset& data, const ForestConfig& cfg) {
    require_data(cfg.n_trees >= 1, "train_forest: needs at least one tree");
    int sub = cfg.feature_subsample;
    if (sub < 0)
        sub = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(data.space.size()))));
    Forest out;
    out.trees.reserve(cfg.n_trees);
    for (int t = 0; t < cfg.n_trees; ++t) {
        Rng rng(derive_seed(cfg.seed, {static_cast<uint64_t>(t), 0}));
        TrainConfig tc;
        tc.max_depth = cfg.max_depth;
        tc.min_samples_leaf = cfg.min_samples_leaf;
        tc.feature_subsample = sub;
        tc.seed = derive_seed(cfg.seed, {static_cast<uint64_t>(t), 1});
        if (cfg.bootstrap) {
            BootstrapSample bs = bootstrap_sample(data, rng);
            out.trees.push_back(train_tree(bs.data, tc));
        } else {
            out.trees.push_back(train_tree(data, tc));
        }
    }
    return out;
}

std::vector<double> forest_scores(const Forest& forest, const Dataset& data) {
    require_data(!forest.trees.empty(), "forest_scores: empty forest");
    std::vector<double> s(data.n(), 0.0);
    for (const DecisionTree& t : forest.trees) {
        std::vector<double> ts = tree_scores(t, data);
        for (int i = 0; i < data.n(); ++i) s[i] += ts[i];
    }
    for (double& v : s) v /= static_cast<double>(forest.trees.size());
    return s;
}

std::vector<double> forest_importance(const Forest& forest, const Dataset& data) {
    require_data(!forest.trees.empty(), "forest_importance: empty forest");
    std::vector<double> imp(data.space.size(), 0.0);
    for (const DecisionTree& t : forest.trees) {
        std::vector<double> ti = gini_importance(t, data);
        for (int j = 0; j < data.space.size(); ++j) imp[j] += ti[j];
    }
    double s = std::accumulate(imp.begin(), imp.end(), 0.0);
    if (s > 0)
        for (double& v : imp) v /= s;
    return imp;
}

}  // namespace treestab
