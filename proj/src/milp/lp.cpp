#include "lmd/milp/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lmd::milp {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kIterationLimit: return "iteration-limit";
  }
  return "unknown";
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-7;
constexpr int kDegenerateRunBeforeBland = 50;

struct StdRow {
  std::vector<Term> terms;  // over shifted structural variables
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
};

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * (cols + 1)) {}

  double& at(std::size_t r, std::size_t c) { return a_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return a_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return a_[r * (cols_ + 1) + cols_]; }
  double rhs(std::size_t r) const { return a_[r * (cols_ + 1) + cols_]; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  void pivot(std::size_t pr, std::size_t pc, std::vector<double>& reduced, double& obj) {
    const std::size_t width = cols_ + 1;
    double* prow = &a_[pr * width];
    const double inv = 1.0 / prow[pc];
    for (std::size_t c = 0; c < width; ++c) prow[c] *= inv;
    prow[pc] = 1.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r == pr) continue;
      double* row = &a_[r * width];
      const double f = row[pc];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < width; ++c) {
        if (prow[c] != 0.0) row[c] -= f * prow[c];
      }
      row[pc] = 0.0;
    }
    const double f = reduced[pc];
    if (f != 0.0) {
      for (std::size_t c = 0; c < cols_; ++c) {
        if (prow[c] != 0.0) reduced[c] -= f * prow[c];
      }
      obj -= f * prow[cols_];
      reduced[pc] = 0.0;
    }
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> a_;
};

enum class PhaseResult { kOptimal, kUnbounded, kIterationLimit };

// Minimizes the objective whose reduced costs are in `reduced`; `obj` holds
// minus the current objective value (tableau convention).
PhaseResult run_phase(Tableau& t, std::vector<std::size_t>& basis, std::vector<double>& reduced,
                      double& obj, const std::vector<bool>& blocked, std::size_t& pivots,
                      std::size_t max_pivots) {
  int degenerate_run = 0;
  bool bland = false;
  while (true) {
    std::size_t enter = t.cols();
    double best = -kPivotTol;
    for (std::size_t c = 0; c < t.cols(); ++c) {
      if (blocked[c]) continue;
      if (reduced[c] < best) {
        enter = c;
        if (bland) break;
        best = reduced[c];
      }
    }
    if (enter == t.cols()) return PhaseResult::kOptimal;
    if (pivots >= max_pivots) return PhaseResult::kIterationLimit;

    std::size_t leave = t.rows();
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < t.rows(); ++r) {
      const double a = t.at(r, enter);
      if (a <= kPivotTol) continue;
      const double ratio = std::max(0.0, t.rhs(r)) / a;
      if (ratio < best_ratio - 1e-12 ||
          (ratio <= best_ratio + 1e-12 && leave < t.rows() && basis[r] < basis[leave])) {
        best_ratio = ratio;
        leave = r;
      }
    }
    if (leave == t.rows()) return PhaseResult::kUnbounded;

    if (best_ratio <= 1e-12) {
      if (++degenerate_run > kDegenerateRunBeforeBland) bland = true;
    } else {
      degenerate_run = 0;
    }
    t.pivot(leave, enter, reduced, obj);
    basis[leave] = enter;
    ++pivots;
  }
}

}  // namespace

LpResult solve_lp(const LpProblem& problem, std::size_t max_pivots) {
  const std::size_t nv = problem.cost.size();
  LpResult result;

  // Shift every variable to y = x - lower >= 0; finite uppers become rows.
  std::vector<StdRow> std_rows;
  std_rows.reserve(problem.rows.size() + nv);
  for (const Row& row : problem.rows) {
    StdRow s{row.terms, row.sense, row.rhs};
    for (const Term& t : row.terms) s.rhs -= t.coef * problem.lower[t.var];
    std_rows.push_back(std::move(s));
  }
  for (std::size_t v = 0; v < nv; ++v) {
    if (!std::isfinite(problem.lower[v])) {
      result.status = LpStatus::kInfeasible;
      return result;
    }
    if (std::isfinite(problem.upper[v])) {
      const double span = problem.upper[v] - problem.lower[v];
      if (span < -kFeasTol) return result;
      std_rows.push_back({{{static_cast<int>(v), 1.0}}, Sense::kLessEqual, std::max(0.0, span)});
    }
  }
  for (StdRow& row : std_rows) {
    if (row.rhs < 0.0) {
      row.rhs = -row.rhs;
      for (Term& t : row.terms) t.coef = -t.coef;
      if (row.sense == Sense::kLessEqual) {
        row.sense = Sense::kGreaterEqual;
      } else if (row.sense == Sense::kGreaterEqual) {
        row.sense = Sense::kLessEqual;
      }
    }
  }

  const std::size_t m = std_rows.size();
  std::size_t slack_count = 0;
  std::size_t art_count = 0;
  for (const StdRow& row : std_rows) {
    if (row.sense != Sense::kEqual) ++slack_count;
    if (row.sense != Sense::kLessEqual) ++art_count;
  }
  const std::size_t cols = nv + slack_count + art_count;
  Tableau t(m, cols);
  std::vector<std::size_t> basis(m);
  std::vector<bool> is_art(cols, false);
  std::size_t next_slack = nv;
  std::size_t next_art = nv + slack_count;
  for (std::size_t r = 0; r < m; ++r) {
    const StdRow& row = std_rows[r];
    for (const Term& term : row.terms) t.at(r, term.var) += term.coef;
    t.rhs(r) = row.rhs;
    if (row.sense == Sense::kLessEqual) {
      t.at(r, next_slack) = 1.0;
      basis[r] = next_slack++;
    } else {
      if (row.sense == Sense::kGreaterEqual) t.at(r, next_slack++) = -1.0;
      t.at(r, next_art) = 1.0;
      is_art[next_art] = true;
      basis[r] = next_art++;
    }
  }

  std::vector<double> reduced(cols, 0.0);
  double obj = 0.0;
  std::vector<bool> blocked(cols, false);
  if (art_count > 0) {
    for (std::size_t r = 0; r < m; ++r) {
      if (!is_art[basis[r]]) continue;
      for (std::size_t c = 0; c < cols; ++c) {
        if (!is_art[c]) reduced[c] -= t.at(r, c);
      }
      obj -= t.rhs(r);
    }
    const PhaseResult p1 =
        run_phase(t, basis, reduced, obj, blocked, result.pivots, max_pivots);
    if (p1 == PhaseResult::kIterationLimit) {
      result.status = LpStatus::kIterationLimit;
      return result;
    }
    if (-obj > kFeasTol * (1.0 + static_cast<double>(m))) {
      result.status = LpStatus::kInfeasible;
      return result;
    }
    // Drive zero-valued artificials out of the basis where possible.
    for (std::size_t r = 0; r < m; ++r) {
      if (!is_art[basis[r]]) continue;
      for (std::size_t c = 0; c < cols; ++c) {
        if (!is_art[c] && std::abs(t.at(r, c)) > 1e-7) {
          double dummy_obj = 0.0;
          t.pivot(r, c, reduced, dummy_obj);
          basis[r] = c;
          break;
        }
      }
    }
    for (std::size_t c = 0; c < cols; ++c) blocked[c] = is_art[c];
  }

  std::fill(reduced.begin(), reduced.end(), 0.0);
  obj = 0.0;
  for (std::size_t v = 0; v < nv; ++v) reduced[v] = problem.cost[v];
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t b = basis[r];
    const double cb = b < nv ? problem.cost[b] : 0.0;
    if (cb == 0.0) continue;
    for (std::size_t c = 0; c < cols; ++c) reduced[c] -= cb * t.at(r, c);
    obj -= cb * t.rhs(r);
  }
  const PhaseResult p2 = run_phase(t, basis, reduced, obj, blocked, result.pivots, max_pivots);
  if (p2 == PhaseResult::kUnbounded) {
    result.status = LpStatus::kUnbounded;
    return result;
  }
  if (p2 == PhaseResult::kIterationLimit) {
    result.status = LpStatus::kIterationLimit;
    return result;
  }

  result.values.assign(problem.lower.begin(), problem.lower.end());
  for (std::size_t r = 0; r < m; ++r) {
    if (basis[r] < nv) result.values[basis[r]] += t.rhs(r);
  }
  result.objective = 0.0;
  for (std::size_t v = 0; v < nv; ++v) result.objective += problem.cost[v] * result.values[v];
  result.status = LpStatus::kOptimal;
  return result;
}

LpResult solve_relaxation(const MilpModel& model, std::size_t max_pivots) {
  LpProblem lp;
  lp.cost = model.objective;
  lp.rows = model.rows;
  lp.lower.reserve(model.variables.size());
  lp.upper.reserve(model.variables.size());
  for (const Variable& v : model.variables) {
    lp.lower.push_back(v.lower);
    lp.upper.push_back(v.upper);
  }
  return solve_lp(lp, max_pivots);
}

}  // namespace lmd::milp
