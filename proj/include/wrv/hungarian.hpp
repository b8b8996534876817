#pragma once
#include <vector>

namespace wrv {

/// Min-cost assignment for a rectangular cost matrix (rows x cols).
/// Returns for each row the assigned column, or -1 when rows > cols and the
/// row is left unassigned. O(n^3) Hungarian algorithm with potentials.
std::vector<int> solve_assignment(const std::vector<std::vector<double>>& cost);

}  // namespace wrv
