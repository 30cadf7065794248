#pragma once

#include <cstddef>
#include <vector>

#include "lmd/milp/model.hpp"

namespace lmd::milp {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

const char* to_string(LpStatus status);

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> values;
  std::size_t pivots = 0;
};

// Continuous linear program: minimize c'x subject to rows and finite lower
// bounds (upper bounds may be infinite).
struct LpProblem {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> cost;
  std::vector<Row> rows;
};

// Two-phase dense tableau simplex. Dantzig pricing, switching to Bland's rule
// once a run of degenerate pivots suggests cycling.
LpResult solve_lp(const LpProblem& problem, std::size_t max_pivots = 200000);

// LP relaxation of the routing model: binaries relaxed to [0, 1].
LpResult solve_relaxation(const MilpModel& model, std::size_t max_pivots = 200000);

}  // namespace lmd::milp
