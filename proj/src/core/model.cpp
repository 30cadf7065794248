#include "lmd/core/model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace lmd {

void Instance::validate(bool allow_empty_windows) const {
  const int n = customer_count();
  if (n < 0) throw InputError("instance has no depot window");
  if (nominal.size() != n + 1) {
    throw InputError(fmt::format("duration matrix is {}x{}, expected {}x{}", nominal.size(),
                                 nominal.size(), n + 1, n + 1));
  }
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      const double d = nominal(i, j);
      if (!std::isfinite(d) || d < 0.0) {
        throw InputError(fmt::format("duration ({},{}) = {} is not a finite non-negative value", i,
                                     j, d));
      }
    }
  }
  if (!std::isfinite(epsilon) || epsilon < 0.0) {
    throw InputError(fmt::format("epsilon {} must be finite and >= 0", epsilon));
  }
  for (int i = 0; i <= n; ++i) {
    const auto& w = windows[i];
    if (std::isnan(w.start) || std::isnan(w.end) || (!allow_empty_windows && w.start > w.end)) {
      throw InputError(fmt::format("node {} has window [{}, {}] with start after end", i, w.start,
                                   w.end));
    }
    if (!std::isfinite(w.start)) throw InputError(fmt::format("node {} window start is infinite", i));
  }
  if (service_times.size() != windows.size()) {
    throw InputError("service_times must have one entry per node");
  }
  for (double s : service_times) {
    if (!std::isfinite(s) || s < 0.0) throw InputError("service times must be finite and >= 0");
  }
  for (std::size_t k = 0; k < fleet.size(); ++k) {
    if (fleet[k] <= 0) throw InputError(fmt::format("vehicle {} has capacity {}", k, fleet[k]));
  }
  if (!coords.empty() && coords.size() != windows.size()) {
    throw InputError("coords must be empty or have one entry per node");
  }
}

Instance make_instance(DurationMatrix nominal, std::vector<TimeWindow> customer_windows,
                       std::vector<int> fleet, double epsilon) {
  Instance inst;
  inst.nominal = std::move(nominal);
  inst.epsilon = epsilon;
  inst.windows.reserve(customer_windows.size() + 1);
  inst.windows.push_back({0.0, 0.0});
  for (const auto& w : customer_windows) inst.windows.push_back(w);
  inst.service_times.assign(inst.windows.size(), 0.0);
  inst.fleet = std::move(fleet);
  inst.validate();
  return inst;
}

DurationMatrix planning_durations(const Instance& instance, bool robust) {
  DurationMatrix d = instance.nominal;
  if (!robust || instance.epsilon == 0.0) return d;
  for (int i = 0; i < d.size(); ++i) {
    for (int j = 0; j < d.size(); ++j) {
      if (i != j) d(i, j) += instance.epsilon;
    }
  }
  return d;
}

namespace {

void check_node(const Instance& instance, NodeId id) {
  if (id < 1 || id > instance.customer_count()) {
    throw InputError(fmt::format("unknown customer id {}", id));
  }
}

}  // namespace

RouteEvaluation evaluate_route(const Instance& instance, const Route& route,
                               const DurationMatrix& durations) {
  RouteEvaluation eval;
  eval.latency.reserve(route.stops.size());
  eval.idle.reserve(route.stops.size());
  NodeId prev = 0;
  double prev_latency = 0.0;
  for (NodeId stop : route.stops) {
    check_node(instance, stop);
    const double arrival = prev_latency + instance.service_times[prev] + durations(prev, stop);
    const auto& w = instance.windows[stop];
    const double latency = std::max(w.start, arrival);
    eval.latency.push_back(latency);
    eval.idle.push_back(latency - arrival);
    eval.objective += latency;
    if (latency > w.end) {
      eval.windows_ok = false;
      eval.late_stops.push_back(stop);
    }
    prev = stop;
    prev_latency = latency;
  }
  if (route.vehicle >= 0 && route.vehicle < instance.vehicle_count() &&
      static_cast<int>(route.stops.size()) > instance.fleet[route.vehicle]) {
    eval.capacity_ok = false;
  }
  return eval;
}

SolutionEvaluation evaluate_solution(const Instance& instance, std::span<const Route> routes,
                                     const DurationMatrix& durations) {
  const int n = instance.customer_count();
  SolutionEvaluation out;
  out.latency.assign(n + 1, 0.0);
  out.idle.assign(n + 1, 0.0);
  std::vector<int> visits(n + 1, 0);
  std::vector<bool> vehicle_used(instance.vehicle_count(), false);

  for (const auto& route : routes) {
    if (route.vehicle < 0 || route.vehicle >= instance.vehicle_count() ||
        vehicle_used[route.vehicle]) {
      out.bad_vehicles.push_back(route.vehicle);
    } else {
      vehicle_used[route.vehicle] = true;
    }
    const RouteEvaluation eval = evaluate_route(instance, route, durations);
    if (!eval.capacity_ok) out.over_capacity.push_back(route.vehicle);
    for (std::size_t p = 0; p < route.stops.size(); ++p) {
      const NodeId id = route.stops[p];
      if (++visits[id] == 2) out.duplicated.push_back(id);
      out.latency[id] = eval.latency[p];
      out.idle[id] = eval.idle[p];
    }
    out.late.insert(out.late.end(), eval.late_stops.begin(), eval.late_stops.end());
    out.objective += eval.objective;
  }
  for (int i = 1; i <= n; ++i) {
    if (visits[i] == 0) out.unserved.push_back(i);
  }
  std::sort(out.late.begin(), out.late.end());
  return out;
}

std::string SolutionEvaluation::describe() const {
  if (feasible()) return "feasible";
  std::string msg;
  auto add = [&msg](const char* label, const auto& ids) {
    if (ids.empty()) return;
    if (!msg.empty()) msg += "; ";
    msg += fmt::format("{}: {{{}}}", label, fmt::join(ids, ", "));
  };
  add("unserved", unserved);
  add("duplicated", duplicated);
  add("over capacity", over_capacity);
  add("bad vehicle", bad_vehicles);
  add("late", late);
  return msg;
}

Solution make_solution(const Instance& instance, std::vector<Route> routes,
                       const DurationMatrix& durations) {
  const SolutionEvaluation eval = evaluate_solution(instance, routes, durations);
  Solution sol;
  sol.routes = std::move(routes);
  sol.latency = eval.latency;
  sol.idle = eval.idle;
  sol.objective = eval.objective;
  return sol;
}

}  // namespace lmd
