#include "ptqrm/assignment.hpp"

#include <limits>
#include <stdexcept>

namespace ptqrm {

// Hungarian algorithm with dual potentials, O(rows^2 * cols). Column 0 is a
// virtual root; indices are 1-based internally.
std::vector<int> min_cost_assignment(const std::vector<std::vector<double>>& cost) {
  const int n = int(cost.size());
  if (n == 0) return {};
  const int m = int(cost[0].size());
  if (m < n) throw std::invalid_argument("min_cost_assignment: needs rows <= cols");
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);  // p[j] = row occupying col j
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
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
    } while (j0);
  }

  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j)
    if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

std::vector<int> greedy_assignment(const std::vector<std::vector<double>>& cost) {
  const int n = int(cost.size());
  if (n == 0) return {};
  const int m = int(cost[0].size());
  std::vector<char> used(m, 0);
  std::vector<int> out(n, -1);
  for (int i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    int jb = -1;
    for (int j = 0; j < m; ++j)
      if (!used[j] && cost[i][j] < best) {
        best = cost[i][j];
        jb = j;
      }
    if (jb >= 0) {
      used[jb] = 1;
      out[i] = jb;
    }
  }
  return out;
}

}  // namespace ptqrm
