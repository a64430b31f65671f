#include "treestab/paths.hpp"

#include <algorithm>
#include <functional>

#include "treestab/errors.hpp"

namespace treestab {

PathSet extract_paths(const DecisionTree& tree, const FeatureSpace& space) {
    tree.validate(space);
    PathSet out;
    out.source_depth = tree.depth();

    TreePath cur;
    cur.lower.resize(space.size());
    cur.upper.resize(space.size());
    cur.masks.resize(space.size());
    for (int j = 0; j < space.size(); ++j) {
        const Feature& f = space.features[j];
        if (f.kind == FeatureKind::Numeric) {
            cur.lower[j] = f.lower;
            cur.upper[j] = f.upper;
        } else {
            cur.masks[j] = Mask::full(f.cardinality);
        }
    }

    std::function<void(int)> walk = [&](int id) {
        const Node& n = tree.nodes[id];
        if (n.kind == Node::Kind::Leaf) {
            TreePath p = cur;
            p.label = n.label;
            p.leaf = id;
            out.paths.push_back(std::move(p));
            return;
        }
        const Feature& f = space.features[n.feature];
        if (f.kind == FeatureKind::Numeric) {
            double lo = cur.lower[n.feature];
            double hi = cur.upper[n.feature];
            require_data(n.threshold >= lo && n.threshold <= hi,
                         "node " + std::to_string(id) + ": split threshold outside the region "
                         "reaching it");
            cur.upper[n.feature] = n.threshold;
            walk(n.left);
            cur.upper[n.feature] = hi;

            cur.lower[n.feature] = n.threshold;
            walk(n.right);
            cur.lower[n.feature] = lo;
        } else {
            Mask m = cur.masks[n.feature];
            Mask go_left = m.intersect(n.categories);
            Mask go_right = m.minus(n.categories);
            require_data(go_left.any() && go_right.any(),
                         "node " + std::to_string(id) + ": categorical split empties one side of "
                         "the region reaching it");
            cur.masks[n.feature] = go_left;
            walk(n.left);
            cur.masks[n.feature] = go_right;
            walk(n.right);
            cur.masks[n.feature] = m;
        }
    };
    walk(0);
    return out;
}

}  // namespace treestab
