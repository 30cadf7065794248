#include "lmd/robust/robust.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include <fmt/format.h>

namespace lmd::robust {

namespace {

DurationMatrix shifted(const Instance& instance, double delta) {
  DurationMatrix d = instance.nominal;
  const int nodes = d.size();
  for (int i = 0; i < nodes; ++i) {
    for (int j = 0; j < nodes; ++j) {
      if (i != j) d(i, j) = std::max(0.0, d(i, j) + delta);
    }
  }
  return d;
}

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t sample_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(sample_id),
                    static_cast<std::uint32_t>(sample_id >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

WorstCaseReport worst_case_check(const Instance& instance, std::span<const Route> routes) {
  WorstCaseReport report;
  report.evaluation = evaluate_solution(instance, routes, planning_durations(instance, true));
  report.feasible = report.evaluation.feasible();
  report.objective = report.evaluation.objective;
  return report;
}

double best_case_objective(const Instance& instance, std::span<const Route> routes) {
  return evaluate_solution(instance, routes, shifted(instance, -instance.epsilon)).objective;
}

UncertaintySampler::UncertaintySampler(const Instance& instance) : instance_(&instance) {
  if (!(instance.epsilon >= 0.0)) throw InputError("epsilon must be non-negative");
}

UncertaintySampler::UncertaintySampler(const Instance& instance,
                                       std::vector<DurationRealization> scenarios)
    : instance_(&instance), scenarios_(std::move(scenarios)) {
  if (scenarios_.empty()) throw InputError("scenario list is empty");
  for (std::size_t s = 0; s < scenarios_.size(); ++s) {
    if (scenarios_[s].size() != instance.nominal.size()) {
      throw InputError(fmt::format("scenario {} has the wrong dimension", s));
    }
    if (!in_uncertainty_set(instance, scenarios_[s])) {
      throw InputError(fmt::format("scenario {} leaves the uncertainty box", s));
    }
  }
}

DurationRealization UncertaintySampler::draw(std::uint64_t seed, std::uint64_t sample_id) const {
  auto rng = stream(seed, sample_id);
  if (!scenarios_.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, scenarios_.size() - 1);
    return scenarios_[pick(rng)];
  }
  const double eps = instance_->epsilon;
  DurationRealization d = instance_->nominal;
  std::uniform_real_distribution<double> noise(-eps, eps);
  const int nodes = d.size();
  for (int i = 0; i < nodes; ++i) {
    for (int j = 0; j < nodes; ++j) {
      if (i != j && eps > 0.0) d(i, j) = std::max(0.0, d(i, j) + noise(rng));
    }
  }
  return d;
}

bool in_uncertainty_set(const Instance& instance, const DurationRealization& d,
                        double tolerance) {
  const int nodes = instance.nominal.size();
  if (d.size() != nodes) return false;
  for (int i = 0; i < nodes; ++i) {
    for (int j = 0; j < nodes; ++j) {
      if (i == j) continue;
      const double v = d(i, j);
      if (!std::isfinite(v) || v < -tolerance) return false;
      if (std::abs(v - instance.nominal(i, j)) > instance.epsilon + tolerance) return false;
    }
  }
  return true;
}

MonteCarloReport monte_carlo_report(const Instance& instance, std::span<const Route> routes,
                                    int samples, std::uint64_t seed) {
  return monte_carlo_report(UncertaintySampler(instance), instance, routes, samples, seed);
}

MonteCarloReport monte_carlo_report(const UncertaintySampler& sampler, const Instance& instance,
                                    std::span<const Route> routes, int samples,
                                    std::uint64_t seed) {
  if (samples < 1) throw InputError("need at least one sample");
  MonteCarloReport report;
  report.samples.reserve(samples);
  report.min_objective = std::numeric_limits<double>::infinity();
  report.max_objective = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  int feasible = 0;
  const int nodes = instance.nominal.size();
  for (int s = 0; s < samples; ++s) {
    const auto d = sampler.draw(seed, static_cast<std::uint64_t>(s));
    for (int i = 0; i < nodes; ++i) {
      for (int j = 0; j < nodes; ++j) {
        if (i != j) {
          report.max_arc_deviation =
              std::max(report.max_arc_deviation, std::abs(d(i, j) - instance.nominal(i, j)));
        }
      }
    }
    const auto eval = evaluate_solution(instance, routes, d);
    SampleOutcome out{static_cast<std::uint64_t>(s), eval.feasible(), eval.objective};
    feasible += out.feasible ? 1 : 0;
    sum += out.objective;
    report.min_objective = std::min(report.min_objective, out.objective);
    report.max_objective = std::max(report.max_objective, out.objective);
    report.samples.push_back(out);
  }
  report.feasible_fraction = static_cast<double>(feasible) / samples;
  report.mean_objective = sum / samples;
  return report;
}

void write_report_csv(const MonteCarloReport& report, std::ostream& out) {
  out << "sample_id,feasible,objective\n";
  for (const auto& s : report.samples) {
    out << fmt::format("{},{},{}\n", s.sample_id, s.feasible ? 1 : 0, s.objective);
  }
}

}  // namespace lmd::robust
