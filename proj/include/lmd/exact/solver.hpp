#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "lmd/core/model.hpp"
#include "lmd/milp/model.hpp"

namespace lmd::exact {

enum class SolveStatus {
  kOptimal,
  kFeasibleAtLimit,  // limit reached with an incumbent
  kInfeasible,       // search exhausted, no feasible routing exists
  kLimitNoSolution,  // limit reached before any incumbent was found
};

const char* to_string(SolveStatus status);

struct ExactOptions {
  double time_limit = 60.0;  // seconds
  std::size_t node_limit = 20'000'000;
  // Incumbent to start from, typically the heuristic's routes. Ignored when
  // infeasible under the model's arc times.
  std::optional<std::vector<Route>> warm_start;
  // Solve the LP relaxation at the root when the model has at most this many
  // variables (dense simplex); 0 disables it.
  std::size_t root_lp_variable_limit = 600;
};

struct ExactResult {
  SolveStatus status = SolveStatus::kInfeasible;
  // Routes and earliest-start schedule under the model's arc times. Empty
  // when no incumbent exists.
  Solution solution;
  double objective = std::numeric_limits<double>::infinity();
  double lower_bound = 0.0;  // proven bound on the optimum
  double root_lp_bound = std::numeric_limits<double>::quiet_NaN();
  std::size_t nodes_expanded = 0;
  std::size_t nodes_dominated = 0;
  double seconds = 0.0;
};

// Best-first branch-and-bound over the model's arc variables. Each branch
// fixes x[k][tail][j] = 1 (extend vehicle k) or x[k][tail][n+1] = 1 (close
// vehicle k and open k+1). Node bounds are combinatorial relaxations of the
// model; see docs in the implementation for the validity argument.
ExactResult solve_exact(const milp::MilpModel& model, const ExactOptions& options = {});

}  // namespace lmd::exact
