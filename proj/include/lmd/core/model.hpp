#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lmd {

// Raised for malformed inputs: unknown node ids, bad matrices, broken files.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using NodeId = int;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

struct TimeWindow {
  double start = 0.0;
  double end = 0.0;
  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

// Square matrix of arc durations (seconds) over depot 0 and customers 1..n.
// The dummy terminal n+1 is implicit: every arc into it costs 0.
class DurationMatrix {
 public:
  DurationMatrix() = default;
  explicit DurationMatrix(int node_count, double fill = 0.0)
      : size_(node_count), data_(static_cast<std::size_t>(node_count) * node_count, fill) {}

  int size() const { return size_; }
  double operator()(int i, int j) const {
    return data_[static_cast<std::size_t>(i) * size_ + j];
  }
  double& operator()(int i, int j) {
    return data_[static_cast<std::size_t>(i) * size_ + j];
  }
  std::span<const double> raw() const { return data_; }

  friend bool operator==(const DurationMatrix&, const DurationMatrix&) = default;

 private:
  int size_ = 0;
  std::vector<double> data_;
};

// One concrete draw of every arc duration from the uncertainty box.
using DurationRealization = DurationMatrix;

// A complete problem datum. Node 0 is the depot, customers are 1..n and the
// dummy terminal is n+1. Index 0 of `windows` and `service_times` belongs to
// the depot.
struct Instance {
  std::string name;
  DurationMatrix nominal;             // (n+1) x (n+1)
  double epsilon = 0.0;               // half-width of the uncertainty box
  std::vector<TimeWindow> windows;    // size n+1
  std::vector<double> service_times;  // size n+1, zeros unless supplied
  std::vector<int> fleet;             // package capacity per vehicle
  std::vector<Point2> coords;         // empty, or size n+1 (meters)

  int customer_count() const { return static_cast<int>(windows.size()) - 1; }
  int vehicle_count() const { return static_cast<int>(fleet.size()); }
  int terminal() const { return customer_count() + 1; }
  bool has_coords() const { return !coords.empty(); }

  // Nominal duration with the dummy terminal folded in.
  double nominal_duration(NodeId i, NodeId j) const {
    return j == terminal() ? 0.0 : nominal(i, j);
  }

  // Throws InputError if any invariant is broken. Windows with start > end
  // are tolerated when `allow_empty_windows` is set (they make the instance
  // infeasible rather than malformed).
  void validate(bool allow_empty_windows = false) const;

  friend bool operator==(const Instance&, const Instance&) = default;
};

// Builds an instance with zero service times and validates it.
Instance make_instance(DurationMatrix nominal, std::vector<TimeWindow> customer_windows,
                       std::vector<int> fleet, double epsilon = 0.0);

// Durations the planner assumes: d̄ when `robust` is false, d̄+ε otherwise.
DurationMatrix planning_durations(const Instance& instance, bool robust);

struct Route {
  int vehicle = 0;
  std::vector<NodeId> stops;
  friend bool operator==(const Route&, const Route&) = default;
};

struct Solution {
  std::vector<Route> routes;
  std::vector<double> latency;  // size n+1, index 0 unused
  std::vector<double> idle;     // size n+1, waiting before the window opens
  double objective = 0.0;

  bool empty() const { return routes.empty(); }
  friend bool operator==(const Solution&, const Solution&) = default;
};

struct RouteEvaluation {
  std::vector<double> latency;  // one per stop
  std::vector<double> idle;     // one per stop
  double objective = 0.0;
  bool windows_ok = true;
  bool capacity_ok = true;
  std::vector<NodeId> late_stops;

  bool feasible() const { return windows_ok && capacity_ok; }
};

// Earliest-start schedule of one route: l_j = max(s_j, l_prev + service_prev + d_prev,j),
// with the depot at time 0.
RouteEvaluation evaluate_route(const Instance& instance, const Route& route,
                               const DurationMatrix& durations);

struct SolutionEvaluation {
  double objective = 0.0;
  std::vector<double> latency;  // size n+1
  std::vector<double> idle;     // size n+1
  std::vector<NodeId> unserved;
  std::vector<NodeId> duplicated;
  std::vector<int> over_capacity;  // vehicle indices
  std::vector<int> bad_vehicles;   // vehicle index out of range or reused
  std::vector<NodeId> late;

  bool feasible() const {
    return unserved.empty() && duplicated.empty() && over_capacity.empty() &&
           bad_vehicles.empty() && late.empty();
  }
  std::string describe() const;
};

SolutionEvaluation evaluate_solution(const Instance& instance, std::span<const Route> routes,
                                     const DurationMatrix& durations);

// Evaluates `routes` and packages the schedule as a Solution.
Solution make_solution(const Instance& instance, std::vector<Route> routes,
                       const DurationMatrix& durations);

}  // namespace lmd
