#pragma once

#include <vector>

namespace ideanet {

/// Exact balanced transportation problem: minimize sum x_ij * cost[i][j]
/// subject to row sums = supply, column sums = demand (both sum to the
/// same total). Solved by the transportation simplex. Returns the optimal
/// objective; optionally fills the optimal plan.
double solve_transport(const std::vector<double>& supply,
                       const std::vector<double>& demand,
                       const std::vector<std::vector<double>>& cost,
                       std::vector<std::vector<double>>* plan = nullptr);

}  // namespace ideanet
