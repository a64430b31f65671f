#pragma once

#include <vector>

namespace treestab {

struct Assignment {
    std::vector<int> row_to_col;
    double cost = 0.0;
};

// Exact minimum-cost perfect matching on a dense square matrix via shortest
// augmenting paths with dual potentials (O(n^3)). Deterministic: among equally
// cheap columns the lowest index is taken.
Assignment solve_assignment(const std::vector<std::vector<double>>& cost);

}  // namespace treestab
