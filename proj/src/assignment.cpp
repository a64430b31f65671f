#include "treestab/assignment.hpp"

#include <limits>

#include "treestab/errors.hpp"

namespace treestab {

Assignment solve_assignment(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    require(n > 0, "assignment: empty matrix");
    for (const auto& row : cost)
        require(static_cast<int>(row.size()) == n, "assignment: matrix must be square");

    const double inf = std::numeric_limits<double>::infinity();
    // 1-based arrays; col 0 is the virtual start column.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> match(n + 1, 0);  // match[j] = row assigned to column j
    std::vector<int> way(n + 1, 0);

    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            int i0 = match[j0];
            int j1 = -1;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            require(j1 != -1, "assignment: no augmenting column found");
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    Assignment out;
    out.row_to_col.assign(n, -1);
    for (int j = 1; j <= n; ++j) {
        require(match[j] >= 1 && match[j] <= n, "assignment: incomplete matching");
        out.row_to_col[match[j] - 1] = j - 1;
        out.cost += cost[match[j] - 1][j - 1];
    }
    for (int i = 0; i < n; ++i) require(out.row_to_col[i] >= 0, "assignment: unassigned row");
    return out;
}

}  // namespace treestab
