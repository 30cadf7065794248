#include "lmd/exact/bruteforce.hpp"

#include <cmath>

#include <fmt/format.h>

namespace lmd::exact {

namespace {

constexpr double kTieTol = 1e-9;

class Enumerator {
 public:
  Enumerator(const Instance& instance, bool robust)
      : instance_(instance),
        durations_(planning_durations(instance, robust)),
        lists_(instance.vehicle_count()) {}

  BruteForceResult run() {
    place(1);
    BruteForceResult result;
    result.evaluated = evaluated_;
    if (!best_) return result;
    std::vector<Route> routes;
    for (int k = 0; k < instance_.vehicle_count(); ++k) {
      if (!best_lists_[k].empty()) routes.push_back({k, best_lists_[k]});
    }
    result.feasible = true;
    result.solution = make_solution(instance_, std::move(routes), durations_);
    result.objective = result.solution.objective;
    return result;
  }

 private:
  // Inserts customer c at every position of every vehicle list.
  void place(int c) {
    if (c > instance_.customer_count()) {
      score();
      return;
    }
    for (int k = 0; k < instance_.vehicle_count(); ++k) {
      auto& list = lists_[k];
      if (static_cast<int>(list.size()) >= instance_.fleet[k]) continue;
      for (std::size_t pos = 0; pos <= list.size(); ++pos) {
        list.insert(list.begin() + static_cast<std::ptrdiff_t>(pos), c);
        place(c + 1);
        list.erase(list.begin() + static_cast<std::ptrdiff_t>(pos));
      }
    }
  }

  void score() {
    ++evaluated_;
    double total = 0.0;
    for (int k = 0; k < instance_.vehicle_count(); ++k) {
      if (lists_[k].empty()) continue;
      const RouteEvaluation eval = evaluate_route(instance_, Route{k, lists_[k]}, durations_);
      if (!eval.feasible()) return;
      total += eval.objective;
    }
    if (!best_ || total < best_objective_ - kTieTol ||
        (std::abs(total - best_objective_) <= kTieTol && lists_ < best_lists_)) {
      best_ = true;
      best_objective_ = total;
      best_lists_ = lists_;
    }
  }

  const Instance& instance_;
  DurationMatrix durations_;
  std::vector<std::vector<NodeId>> lists_;
  std::vector<std::vector<NodeId>> best_lists_;
  bool best_ = false;
  double best_objective_ = 0.0;
  std::size_t evaluated_ = 0;
};

}  // namespace

BruteForceResult solve_bruteforce(const Instance& instance, bool robust) {
  instance.validate(/*allow_empty_windows=*/true);
  if (instance.customer_count() > kBruteForceMaxCustomers) {
    throw InputError(fmt::format("brute force is limited to {} customers, instance has {}",
                                 kBruteForceMaxCustomers, instance.customer_count()));
  }
  return Enumerator(instance, robust).run();
}

}  // namespace lmd::exact
