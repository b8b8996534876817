#include <doctest.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "wrv/hungarian.hpp"

using namespace wrv;

namespace {

double assignment_cost(const std::vector<std::vector<double>>& cost,
                       const std::vector<int>& row_to_col) {
  double total = 0.0;
  for (std::size_t i = 0; i < row_to_col.size(); ++i) {
    if (row_to_col[i] >= 0) total += cost[i][row_to_col[i]];
  }
  return total;
}

// exhaustive minimum over all assignments of min(rows, cols) pairs
double brute_force_min(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  const int m = static_cast<int>(cost[0].size());
  std::vector<int> cols(m);
  std::iota(cols.begin(), cols.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  if (n <= m) {
    std::vector<int> pick(m);
    std::iota(pick.begin(), pick.end(), 0);
    do {
      double c = 0.0;
      for (int i = 0; i < n; ++i) c += cost[i][pick[i]];
      best = std::min(best, c);
    } while (std::next_permutation(pick.begin(), pick.end()));
  } else {
    std::vector<int> rows(n);
    std::iota(rows.begin(), rows.end(), 0);
    do {
      double c = 0.0;
      for (int j = 0; j < m; ++j) c += cost[rows[j]][j];
      best = std::min(best, c);
    } while (std::next_permutation(rows.begin(), rows.end()));
  }
  return best;
}

}  // namespace

TEST_CASE("assignment: trivial and hand-checked cases") {
  CHECK(solve_assignment({{5.0}}) == std::vector<int>{0});

  const std::vector<std::vector<double>> cost = {{1, 100}, {100, 1}};
  CHECK(solve_assignment(cost) == std::vector<int>{0, 1});

  const std::vector<std::vector<double>> swapped = {{100, 1}, {1, 100}};
  CHECK(solve_assignment(swapped) == std::vector<int>{1, 0});
}

TEST_CASE("assignment: rectangular shapes leave extras unassigned") {
  // 2 rows, 1 col: only the cheaper row is assigned
  const std::vector<std::vector<double>> tall = {{10.0}, {2.0}};
  const auto r = solve_assignment(tall);
  CHECK(r[0] == -1);
  CHECK(r[1] == 0);

  // 1 row, 3 cols
  const std::vector<std::vector<double>> wide = {{7.0, 3.0, 9.0}};
  CHECK(solve_assignment(wide) == std::vector<int>{1});
}

TEST_CASE("assignment equals brute force on random instances up to 6x6") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::uniform_int_distribution<int> dim(1, 6);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = dim(rng), m = dim(rng);
    std::vector<std::vector<double>> cost(n, std::vector<double>(m));
    for (auto& row : cost) {
      for (auto& c : row) c = u(rng);
    }
    const auto sol = solve_assignment(cost);
    const int expected_assigned = std::min(n, m);
    int assigned = 0;
    std::vector<char> used(m, false);
    for (int i = 0; i < n; ++i) {
      if (sol[i] >= 0) {
        ++assigned;
        CHECK(!used[sol[i]]);
        used[sol[i]] = true;
      }
    }
    CHECK(assigned == expected_assigned);
    CHECK(assignment_cost(cost, sol) ==
          doctest::Approx(brute_force_min(cost)).epsilon(1e-9));
  }
}
