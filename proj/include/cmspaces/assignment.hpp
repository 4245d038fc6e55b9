#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

namespace cmspaces {

// Minimum-cost perfect matching on a square cost matrix (Hungarian algorithm
// with potentials, O(n^3)). Returns the total cost; row_of_col[j] gives the
// row matched to column j when a non-null pointer is passed.
inline double min_cost_assignment(const Eigen::MatrixXd& cost,
                                  std::vector<int>* row_of_col = nullptr) {
    const int n = static_cast<int>(cost.rows());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = -1;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    double total = 0.0;
    for (int j = 1; j <= n; ++j) total += cost(p[j] - 1, j - 1);
    if (row_of_col) {
        row_of_col->assign(n, -1);
        for (int j = 1; j <= n; ++j) (*row_of_col)[j - 1] = p[j] - 1;
    }
    return total;
}

}  // namespace cmspaces
