#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "lmd/core/model.hpp"

namespace lmd::heuristic {

// No restart managed to insert every customer. Carries the most complete
// partial packing for diagnostics.
class HeuristicFailure : public std::runtime_error {
 public:
  HeuristicFailure(const std::string& what, std::vector<Route> partial,
                   std::vector<NodeId> unplaced)
      : std::runtime_error(what), partial_(std::move(partial)), unplaced_(std::move(unplaced)) {}

  const std::vector<Route>& partial() const { return partial_; }
  const std::vector<NodeId>& unplaced() const { return unplaced_; }

 private:
  std::vector<Route> partial_;
  std::vector<NodeId> unplaced_;
};

struct HeuristicOptions {
  bool robust = false;
  std::uint64_t seed = 1;
  // Restarts = max(1, budget / 10). Each restart runs local search to a local
  // optimum, capped at `iteration_budget` accepted moves.
  int iteration_budget = 100;
};

struct HeuristicResult {
  Solution solution;
  double initial_objective = 0.0;  // insertion objective of the winning restart
  std::vector<double> trace;       // objective after each accepted move, winner only
  int restarts = 0;
  int failed_restarts = 0;
};

// Cheapest-latency-increase insertion followed by relocate / inter-route swap
// / intra-route 2-opt local search accepting strict improvements in the sum
// of latencies. Restart 0 inserts customers by deadline; later restarts use
// seed-shuffled orders.
HeuristicResult solve_heuristic(const Instance& instance, const HeuristicOptions& options = {});

}  // namespace lmd::heuristic
