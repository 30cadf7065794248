#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "lmd/core/model.hpp"

namespace lmd::robust {

struct WorstCaseReport {
  bool feasible = false;
  double objective = 0.0;  // Σ l_i with every arc at d̄+ε
  SolutionEvaluation evaluation;
};

// Evaluates the routes with every arc i != j pushed to d̄+ε.
WorstCaseReport worst_case_check(const Instance& instance, std::span<const Route> routes);

// Objective with every arc at max(0, d̄-ε). Latencies are non-decreasing in
// each arc duration, so no realization in the box scores below this.
double best_case_objective(const Instance& instance, std::span<const Route> routes);

// Draws duration matrices from the box around d̄. Uniform mode perturbs each
// arc independently by U[-ε, ε] and clamps at zero. Scenario mode picks one
// matrix from a fixed list, each of which must lie in the box.
class UncertaintySampler {
 public:
  explicit UncertaintySampler(const Instance& instance);
  UncertaintySampler(const Instance& instance, std::vector<DurationRealization> scenarios);

  // Realization `sample_id` of the stream identified by `seed`. The same
  // (seed, sample_id) pair always yields the same matrix.
  DurationRealization draw(std::uint64_t seed, std::uint64_t sample_id) const;

  bool uses_scenarios() const { return !scenarios_.empty(); }

 private:
  const Instance* instance_;
  std::vector<DurationRealization> scenarios_;
};

// True if every arc of `d` lies in [max(0, d̄-ε), d̄+ε] (diagonal ignored).
bool in_uncertainty_set(const Instance& instance, const DurationRealization& d,
                        double tolerance = 1e-9);

struct SampleOutcome {
  std::uint64_t sample_id = 0;
  bool feasible = false;
  double objective = 0.0;
};

struct MonteCarloReport {
  std::vector<SampleOutcome> samples;
  double feasible_fraction = 0.0;
  double min_objective = 0.0;
  double mean_objective = 0.0;
  double max_objective = 0.0;
  double max_arc_deviation = 0.0;  // max |d - d̄| over all drawn arcs
};

MonteCarloReport monte_carlo_report(const Instance& instance, std::span<const Route> routes,
                                    int samples, std::uint64_t seed);
MonteCarloReport monte_carlo_report(const UncertaintySampler& sampler, const Instance& instance,
                                    std::span<const Route> routes, int samples,
                                    std::uint64_t seed);

// sample_id,feasible,objective
void write_report_csv(const MonteCarloReport& report, std::ostream& out);

}  // namespace lmd::robust
