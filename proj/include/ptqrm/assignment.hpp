#pragma once

#include <vector>

namespace ptqrm {

// Minimum-cost assignment of rows to columns for a dense cost matrix with
// rows <= cols (shortest augmenting path, O(rows^2 * cols)). Returns, per
// row, the assigned column. Used for eigenvalue branch tracking between
// neighbouring grid points.
std::vector<int> min_cost_assignment(const std::vector<std::vector<double>>& cost);

// Greedy fallback for large problems: rows in order take their nearest free
// column.
std::vector<int> greedy_assignment(const std::vector<std::vector<double>>& cost);

}  // namespace ptqrm
