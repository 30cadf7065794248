#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "lmd/core/model.hpp"

namespace test {

using lmd::DurationMatrix;
using lmd::Instance;
using lmd::Route;
using lmd::TimeWindow;

inline constexpr double kOpen = 1e6;

// Customers 1..n on a line at positions 1..n, depot at 0, unit spacing.
inline Instance line_instance(int n, int vehicles = 1, int capacity = -1) {
  DurationMatrix d(n + 1);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) d(i, j) = std::abs(i - j);
  return lmd::make_instance(d, std::vector<TimeWindow>(n, {0.0, kOpen}),
                            std::vector<int>(vehicles, capacity < 0 ? n : capacity));
}

// Small random instance: Euclidean durations on a 50 x 50 square, windows of
// mixed tightness, capacities summing to at least n.
inline Instance random_instance(std::mt19937_64& rng, int n, int m, double eps) {
  std::uniform_real_distribution<double> coord(0.0, 50.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Instance inst;
  inst.epsilon = eps;
  for (int i = 0; i <= n; ++i) inst.coords.push_back({coord(rng), coord(rng)});
  inst.nominal = DurationMatrix(n + 1);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      if (i != j)
        inst.nominal(i, j) = std::hypot(inst.coords[i].x - inst.coords[j].x,
                                        inst.coords[i].y - inst.coords[j].y);
  inst.windows.push_back({0.0, 0.0});
  for (int i = 1; i <= n; ++i) {
    const double centre = inst.nominal(0, i) + 120.0 * unit(rng);
    const double width = unit(rng) < 0.3 ? 20.0 + 30.0 * unit(rng) : 80.0 + 200.0 * unit(rng);
    inst.windows.push_back({std::max(0.0, centre - width / 2), centre + width / 2});
  }
  for (int i = 1; i <= n; ++i) inst.windows[0].end = std::max(inst.windows[0].end, inst.windows[i].end);
  inst.service_times.assign(n + 1, 0.0);
  std::uniform_int_distribution<int> cap(1, n);
  int total = 0;
  for (int k = 0; k < m; ++k) {
    inst.fleet.push_back(cap(rng));
    total += inst.fleet.back();
  }
  if (total < n) inst.fleet.back() += n - total;
  inst.name = "random";
  return inst;
}

// Sum of earliest-start service times along `order`, or +inf if a window is
// missed. Written independently of the library evaluator.
inline double schedule_cost(const Instance& inst, const DurationMatrix& d,
                            const std::vector<int>& order) {
  double t = 0.0, sum = 0.0;
  int prev = 0;
  for (int c : order) {
    t = std::max(inst.windows[c].start, t + inst.service_times[prev] + d(prev, c));
    if (t > inst.windows[c].end) return std::numeric_limits<double>::infinity();
    sum += t;
    prev = c;
  }
  return sum;
}

// Best order of a fixed customer set by full permutation enumeration.
inline double best_order(const Instance& inst, const DurationMatrix& d, std::vector<int> set) {
  if (set.empty()) return 0.0;
  std::sort(set.begin(), set.end());
  double best = std::numeric_limits<double>::infinity();
  do best = std::min(best, schedule_cost(inst, d, set));
  while (std::next_permutation(set.begin(), set.end()));
  return best;
}

// Optimum over every assignment of customers to vehicles; +inf if none is
// feasible.
inline double enumerate_optimum(const Instance& inst, const DurationMatrix& d) {
  const int n = inst.customer_count();
  const int m = inst.vehicle_count();
  std::vector<int> owner(n, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    std::vector<std::vector<int>> sets(m);
    for (int c = 0; c < n; ++c) sets[owner[c]].push_back(c + 1);
    bool fits = true;
    for (int k = 0; k < m; ++k) fits = fits && static_cast<int>(sets[k].size()) <= inst.fleet[k];
    if (fits) {
      double total = 0.0;
      for (int k = 0; k < m && std::isfinite(total); ++k) total += best_order(inst, d, sets[k]);
      best = std::min(best, total);
    }
    int pos = 0;
    while (pos < n && ++owner[pos] == m) owner[pos++] = 0;
    if (pos == n) break;
  }
  return best;
}

}  // namespace test
