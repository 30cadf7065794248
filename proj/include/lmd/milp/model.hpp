#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lmd/core/model.hpp"

namespace lmd::milp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Sense { kLessEqual, kEqual, kGreaterEqual };

// Constraint families of the three-index formulation, in emission order.
enum class RowFamily {
  kAssignment,          // every customer left exactly once
  kFlowConservation,    // in-flow equals out-flow per vehicle and customer
  kDepartOnce,          // at most one depot departure per vehicle
  kArriveOnce,          // at most one terminal arrival per vehicle
  kNoLeaveTerminal,     // nothing leaves the dummy terminal
  kNoEnterDepot,        // nothing returns to the depot
  kCapacity,            // customers served per vehicle
  kPrecedence,          // big-M latency ordering between customers
  kDepotPrecedence,     // big-M ordering from the depot
  kTerminalPrecedence,  // big-M ordering into the dummy terminal
};

struct Term {
  int var = 0;
  double coef = 0.0;
};

struct Row {
  std::string name;
  RowFamily family = RowFamily::kAssignment;
  std::vector<Term> terms;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
};

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInfinity;
  bool binary = false;
};

// The routing data the rows were generated from. `arc_time` already contains
// the departure node's service time and, for robust models, the +ε shift.
struct RoutingData {
  int customers = 0;
  int vehicles = 0;
  std::vector<int> capacities;
  DurationMatrix arc_time;  // (n+1) x (n+1); arcs into n+1 cost 0
  std::vector<TimeWindow> windows;
  bool robust = false;
  double horizon = 0.0;  // upper bound on any earliest-start latency

  double arc(int i, int j) const { return j == customers + 1 ? 0.0 : arc_time(i, j); }
};

struct RowCensus {
  std::size_t assignment = 0;
  std::size_t flow = 0;
  std::size_t trip = 0;        // depart-once + arrive-once
  std::size_t dummy_flow = 0;  // terminal/depot blocking rows
  std::size_t capacity = 0;
  std::size_t precedence = 0;  // all three big-M families
  std::size_t total() const { return assignment + flow + trip + dummy_flow + capacity + precedence; }
};

class MilpModel {
 public:
  std::vector<Variable> variables;
  std::vector<Row> rows;
  std::vector<double> objective;  // one coefficient per variable
  RoutingData data;
  double big_m = 0.0;  // largest big-M coefficient in use

  int node_count() const { return data.customers + 2; }
  int arc_var(int vehicle, int from, int to) const;
  int latency_var(int node) const;

  RowCensus census() const;

  // Rows violated by `values` beyond `tol`, plus bound/integrality checks
  // reported as row index `rows.size()` + variable index.
  std::vector<std::size_t> violations(std::span<const double> values, double tol = 1e-6) const;

  double evaluate_objective(std::span<const double> values) const;

  // Variable assignment corresponding to routes scheduled by the core
  // evaluator under this model's arc times.
  std::vector<double> encode(std::span<const Route> routes) const;

  // Routes read off the binary arc variables (values rounded at 0.5).
  std::vector<Route> decode(std::span<const double> values) const;
};

// Builds the MILP. With `robust` every arc duration becomes d̄+ε, the
// worst case over the box.
MilpModel build_model(const Instance& instance, bool robust);

// CPLEX-style LP text: objective, constraints, bounds, binaries.
void write_lp(const MilpModel& model, std::ostream& out);

}  // namespace lmd::milp
