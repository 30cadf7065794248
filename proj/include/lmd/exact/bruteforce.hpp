#pragma once

#include <cstddef>

#include "lmd/core/model.hpp"

namespace lmd::exact {

inline constexpr int kBruteForceMaxCustomers = 9;

struct BruteForceResult {
  bool feasible = false;
  Solution solution;  // empty when infeasible
  double objective = 0.0;
  std::size_t evaluated = 0;  // complete assignments scored
};

// Verification oracle: enumerates every assignment of customers to vehicles
// and every order within each vehicle, scores each with the core evaluator
// under d̄ (or d̄+ε when `robust`), and keeps the cheapest feasible one. Ties
// go to the lexicographically smallest per-vehicle stop lists.
// Throws InputError when the instance has more than kBruteForceMaxCustomers.
BruteForceResult solve_bruteforce(const Instance& instance, bool robust);

}  // namespace lmd::exact
