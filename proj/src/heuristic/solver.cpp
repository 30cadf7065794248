#include "lmd/heuristic/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>

#include <fmt/format.h>

namespace lmd::heuristic {

namespace {

constexpr double kImprovement = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

using Stops = std::vector<NodeId>;

class RouteScorer {
 public:
  RouteScorer(const Instance& instance, bool robust)
      : instance_(instance), durations_(planning_durations(instance, robust)) {}

  // Sum of earliest-start latencies, or +inf if a window or the capacity is
  // violated.
  double cost(int vehicle, const Stops& stops) const {
    if (static_cast<int>(stops.size()) > instance_.fleet[vehicle]) return kInf;
    double total = 0.0;
    double latency = 0.0;
    NodeId prev = 0;
    for (NodeId stop : stops) {
      const auto& w = instance_.windows[stop];
      latency = std::max(w.start, latency + instance_.service_times[prev] + durations_(prev, stop));
      if (latency > w.end) return kInf;
      total += latency;
      prev = stop;
    }
    return total;
  }

  const DurationMatrix& durations() const { return durations_; }

 private:
  const Instance& instance_;
  DurationMatrix durations_;
};

struct Packing {
  std::vector<Stops> routes;  // one per vehicle
  std::vector<double> costs;
  double total = 0.0;
  std::vector<NodeId> unplaced;
};

Packing insert_all(const RouteScorer& scorer, int vehicles, const std::vector<NodeId>& order) {
  Packing p;
  p.routes.assign(vehicles, {});
  p.costs.assign(vehicles, 0.0);
  for (NodeId c : order) {
    double best_delta = kInf;
    int best_k = -1;
    std::size_t best_pos = 0;
    for (int k = 0; k < vehicles; ++k) {
      Stops& r = p.routes[k];
      for (std::size_t pos = 0; pos <= r.size(); ++pos) {
        r.insert(r.begin() + static_cast<std::ptrdiff_t>(pos), c);
        const double delta = scorer.cost(k, r) - p.costs[k];
        r.erase(r.begin() + static_cast<std::ptrdiff_t>(pos));
        if (delta < best_delta) {
          best_delta = delta;
          best_k = k;
          best_pos = pos;
        }
      }
    }
    if (best_k < 0 || best_delta == kInf) {
      p.unplaced.push_back(c);
      continue;
    }
    Stops& r = p.routes[best_k];
    r.insert(r.begin() + static_cast<std::ptrdiff_t>(best_pos), c);
    p.costs[best_k] += best_delta;
    p.total += best_delta;
  }
  return p;
}

class LocalSearch {
 public:
  LocalSearch(const RouteScorer& scorer, Packing& packing, int move_cap)
      : scorer_(scorer), p_(packing), move_cap_(move_cap) {}

  std::vector<double> run() {
    std::vector<double> trace{p_.total};
    for (int moves = 0; moves < move_cap_; ++moves) {
      if (!(relocate() || swap() || two_opt())) break;
      trace.push_back(p_.total);
    }
    return trace;
  }

 private:
  bool accept(int a, Stops ra, double ca, int b, Stops rb, double cb) {
    const double old_cost = p_.costs[a] + (a == b ? 0.0 : p_.costs[b]);
    const double new_cost = ca + (a == b ? 0.0 : cb);
    if (!(new_cost < old_cost - kImprovement)) return false;
    p_.routes[a] = std::move(ra);
    p_.costs[a] = ca;
    if (a != b) {
      p_.routes[b] = std::move(rb);
      p_.costs[b] = cb;
    }
    recompute_total();
    return true;
  }

  void recompute_total() {
    p_.total = std::accumulate(p_.costs.begin(), p_.costs.end(), 0.0);
  }

  bool relocate() {
    const int m = static_cast<int>(p_.routes.size());
    for (int a = 0; a < m; ++a) {
      for (std::size_t i = 0; i < p_.routes[a].size(); ++i) {
        Stops from = p_.routes[a];
        const NodeId c = from[i];
        from.erase(from.begin() + static_cast<std::ptrdiff_t>(i));
        const double from_cost = scorer_.cost(a, from);
        for (int b = 0; b < m; ++b) {
          const Stops& base = a == b ? from : p_.routes[b];
          for (std::size_t pos = 0; pos <= base.size(); ++pos) {
            if (a == b && pos == i) continue;
            Stops to = base;
            to.insert(to.begin() + static_cast<std::ptrdiff_t>(pos), c);
            const double to_cost = scorer_.cost(b, to);
            if (to_cost == kInf) continue;
            if (a == b) {
              if (accept(a, to, to_cost, a, {}, 0.0)) return true;
            } else if (from_cost != kInf && accept(a, from, from_cost, b, to, to_cost)) {
              return true;
            }
          }
        }
      }
    }
    return false;
  }

  bool swap() {
    const int m = static_cast<int>(p_.routes.size());
    for (int a = 0; a < m; ++a) {
      for (int b = a + 1; b < m; ++b) {
        for (std::size_t i = 0; i < p_.routes[a].size(); ++i) {
          for (std::size_t j = 0; j < p_.routes[b].size(); ++j) {
            Stops ra = p_.routes[a];
            Stops rb = p_.routes[b];
            std::swap(ra[i], rb[j]);
            const double ca = scorer_.cost(a, ra);
            if (ca == kInf) continue;
            const double cb = scorer_.cost(b, rb);
            if (cb == kInf) continue;
            if (accept(a, std::move(ra), ca, b, std::move(rb), cb)) return true;
          }
        }
      }
    }
    return false;
  }

  bool two_opt() {
    const int m = static_cast<int>(p_.routes.size());
    for (int a = 0; a < m; ++a) {
      const std::size_t len = p_.routes[a].size();
      for (std::size_t i = 0; i + 1 < len; ++i) {
        for (std::size_t j = i + 1; j < len; ++j) {
          Stops r = p_.routes[a];
          std::reverse(r.begin() + static_cast<std::ptrdiff_t>(i),
                       r.begin() + static_cast<std::ptrdiff_t>(j) + 1);
          const double c = scorer_.cost(a, r);
          if (c == kInf) continue;
          if (accept(a, std::move(r), c, a, {}, 0.0)) return true;
        }
      }
    }
    return false;
  }

  const RouteScorer& scorer_;
  Packing& p_;
  int move_cap_;
};

std::vector<Route> to_routes(const std::vector<Stops>& lists) {
  std::vector<Route> routes;
  for (std::size_t k = 0; k < lists.size(); ++k) {
    if (!lists[k].empty()) routes.push_back({static_cast<int>(k), lists[k]});
  }
  return routes;
}

}  // namespace

HeuristicResult solve_heuristic(const Instance& instance, const HeuristicOptions& options) {
  instance.validate();
  const int n = instance.customer_count();
  const int m = instance.vehicle_count();
  const long total_capacity = std::accumulate(instance.fleet.begin(), instance.fleet.end(), 0L);
  if (total_capacity < n) {
    throw InputError(
        fmt::format("fleet capacity {} cannot serve {} customers", total_capacity, n));
  }

  const RouteScorer scorer(instance, options.robust);
  const int restarts = std::max(1, options.iteration_budget / 10);
  const int move_cap = std::max(1, options.iteration_budget);

  std::vector<NodeId> base(n);
  std::iota(base.begin(), base.end(), 1);
  std::stable_sort(base.begin(), base.end(), [&](NodeId a, NodeId b) {
    const auto& wa = instance.windows[a];
    const auto& wb = instance.windows[b];
    if (wa.end != wb.end) return wa.end < wb.end;
    return wa.start < wb.start;
  });

  HeuristicResult result;
  result.restarts = restarts;
  std::optional<Packing> best;
  std::vector<double> best_trace;
  std::optional<Packing> most_complete;

  for (int r = 0; r < restarts; ++r) {
    std::vector<NodeId> order = base;
    if (r > 0) {
      std::seed_seq seq{static_cast<std::uint32_t>(options.seed),
                        static_cast<std::uint32_t>(options.seed >> 32),
                        static_cast<std::uint32_t>(r)};
      std::mt19937_64 rng(seq);
      std::shuffle(order.begin(), order.end(), rng);
    }
    Packing packing = insert_all(scorer, m, order);
    if (!packing.unplaced.empty()) {
      ++result.failed_restarts;
      if (!most_complete || packing.unplaced.size() < most_complete->unplaced.size()) {
        most_complete = std::move(packing);
      }
      continue;
    }
    std::vector<double> trace = LocalSearch(scorer, packing, move_cap).run();
    if (!best || packing.total < best->total - kImprovement) {
      best = std::move(packing);
      best_trace = std::move(trace);
    }
  }

  if (!best) {
    throw HeuristicFailure(
        fmt::format("no feasible insertion for {} customer(s) in any of {} restart(s)",
                    most_complete->unplaced.size(), restarts),
        to_routes(most_complete->routes), most_complete->unplaced);
  }
  result.solution = make_solution(instance, to_routes(best->routes), scorer.durations());
  result.initial_objective = best_trace.front();
  result.trace = std::move(best_trace);
  return result;
}

}  // namespace lmd::heuristic
