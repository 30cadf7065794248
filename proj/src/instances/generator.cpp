#include "lmd/instances/generator.hpp"

#include <cmath>
#include <random>

#include <fmt/format.h>

#include "lmd/heuristic/solver.hpp"

namespace lmd::instances {

int sweep_capacity(int customers, int vehicles) {
  return (2 * customers + vehicles - 1) / vehicles;
}

Instance generate_random(int customers, int vehicles, std::uint64_t seed,
                         const GeneratorOptions& options) {
  if (customers < 1 || vehicles < 1) {
    throw InputError(fmt::format("need at least one customer and one vehicle (got {}, {})",
                                 customers, vehicles));
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> coord(0.0, options.side);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Instance inst;
  inst.name = fmt::format("random-n{}-k{}-s{}", customers, vehicles, seed);
  inst.epsilon = options.epsilon;
  inst.coords.push_back({options.side / 2.0, options.side / 2.0});
  for (int i = 0; i < customers; ++i) inst.coords.push_back({coord(rng), coord(rng)});
  const int nodes = customers + 1;
  inst.nominal = DurationMatrix(nodes);
  for (int i = 0; i < nodes; ++i) {
    for (int j = 0; j < nodes; ++j) {
      if (i != j) {
        inst.nominal(i, j) = std::hypot(inst.coords[i].x - inst.coords[j].x,
                                        inst.coords[i].y - inst.coords[j].y);
      }
    }
  }
  inst.service_times.assign(nodes, 0.0);
  inst.fleet.assign(vehicles, sweep_capacity(customers, vehicles));

  double width_scale = 1.0;
  for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
    if (attempt > 0 && attempt % options.widen_after == 0) width_scale *= options.widen_factor;
    inst.windows.assign(1, TimeWindow{0.0, 0.0});
    for (int i = 1; i <= customers; ++i) {
      const double centre = inst.nominal(0, i) + options.centre_spread * unit(rng);
      const double width =
          width_scale * (options.width_min + (options.width_max - options.width_min) * unit(rng));
      const double start = std::max(0.0, centre - width / 2.0);
      inst.windows.push_back({start, centre + width / 2.0});
    }
    inst.windows[0].end = 0.0;
    for (int i = 1; i <= customers; ++i) {
      inst.windows[0].end = std::max(inst.windows[0].end, inst.windows[i].end);
    }
    try {
      heuristic::solve_heuristic(inst, {.robust = true, .seed = seed, .iteration_budget = 20});
      inst.validate();
      return inst;
    } catch (const heuristic::HeuristicFailure&) {
      // redraw windows
    }
  }
  throw InputError(fmt::format("no feasible windows after {} attempts", options.max_attempts));
}

}  // namespace lmd::instances
