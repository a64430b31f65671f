#include "treestab/tree.hpp"

#include <cmath>
#include <functional>

#include "treestab/errors.hpp"

namespace treestab {

int DecisionTree::depth() const {
    require(!nodes.empty(), "depth() on empty tree");
    int best = 0;
    std::function<void(int, int)> walk = [&](int id, int d) {
        const Node& n = nodes[id];
        if (n.kind == Node::Kind::Leaf) {
            best = std::max(best, d);
            return;
        }
        walk(n.left, d + 1);
        walk(n.right, d + 1);
    };
    walk(0, 0);
    return best;
}

void DecisionTree::validate(const FeatureSpace& space) const {
    require_data(!nodes.empty(), "tree has no nodes");
    std::vector<int> seen(nodes.size(), 0);
    std::function<void(int)> walk = [&](int id) {
        require_data(id >= 0 && id < static_cast<int>(nodes.size()),
                     "node reference out of range: " + std::to_string(id));
        require_data(!seen[id], "node " + std::to_string(id) + " reachable more than once");
        seen[id] = 1;
        const Node& n = nodes[id];
        if (n.kind == Node::Kind::Split) {
            require_data(n.feature >= 0 && n.feature < space.size(),
                         "node " + std::to_string(id) + ": feature index out of range");
            const Feature& f = space.features[n.feature];
            if (f.kind == FeatureKind::Numeric) {
                require_data(std::isfinite(n.threshold) && n.threshold >= f.lower &&
                                 n.threshold <= f.upper,
                             "node " + std::to_string(id) + ": threshold outside feature bounds");
            } else {
                require_data(n.categories.n == f.cardinality,
                             "node " + std::to_string(id) + ": category mask size mismatch");
                int c = n.categories.count();
                require_data(c >= 1 && c < f.cardinality,
                             "node " + std::to_string(id) +
                                 ": category subset must be a non-empty proper subset");
            }
            walk(n.left);
            walk(n.right);
        } else {
            require_data(n.label >= 0 && n.label < space.num_classes,
                         "node " + std::to_string(id) + ": leaf label out of range");
            if (!n.distribution.empty()) {
                require_data(static_cast<int>(n.distribution.size()) == space.num_classes,
                             "node " + std::to_string(id) + ": distribution size mismatch");
                double s = 0;
                for (double p : n.distribution) {
                    require_data(p >= 0.0 && p <= 1.0,
                                 "node " + std::to_string(id) + ": distribution entry outside [0,1]");
                    s += p;
                }
                require_data(std::fabs(s - 1.0) < 1e-9,
                             "node " + std::to_string(id) + ": distribution does not sum to 1");
            }
        }
    };
    walk(0);
    for (std::size_t i = 0; i < nodes.size(); ++i)
        require_data(seen[i], "node " + std::to_string(i) + " unreachable from the root");
}

int DecisionTree::descend(std::span<const double> row, const FeatureSpace& space) const {
    require(!nodes.empty(), "descend() on empty tree");
    require_data(static_cast<int>(row.size()) == space.size(),
                 "row width does not match the feature space");
    int id = 0;
    while (nodes[id].kind == Node::Kind::Split) {
        const Node& n = nodes[id];
        double v = row[n.feature];
        require_data(std::isfinite(v), "non-finite value for feature " + std::to_string(n.feature));
        const Feature& f = space.features[n.feature];
        if (f.kind == FeatureKind::Numeric) {
            id = (v <= n.threshold) ? n.left : n.right;
        } else {
            int cat = static_cast<int>(v);
            require_data(cat >= 0 && cat < f.cardinality && static_cast<double>(cat) == v,
                         "invalid category value for feature " + std::to_string(n.feature));
            id = n.categories.test(cat) ? n.left : n.right;
        }
    }
    return id;
}

}  // namespace treestab
