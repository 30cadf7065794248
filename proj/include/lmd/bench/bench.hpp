#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lmd/core/model.hpp"

namespace lmd::bench {

enum class SolverKind { kExact, kHeuristic };
const char* to_string(SolverKind s);
SolverKind parse_solver(const std::string& name);

struct SolveRequest {
  SolverKind solver = SolverKind::kExact;
  bool robust = false;
  double time_limit = 60.0;
  std::uint64_t seed = 1;
  int iteration_budget = 100;
};

struct SolveOutcome {
  std::string status;  // optimal | feasible | infeasible | timeout
  std::optional<Solution> solution;
  double objective = 0.0;
  double lower_bound = 0.0;
  double seconds = 0.0;
  std::size_t nodes = 0;
};

// Exact runs are warm-started by the heuristic; the reported time covers both.
SolveOutcome solve(const Instance& instance, const SolveRequest& request);

struct BenchRecord {
  int instance_id = 0;
  int n = 0;
  int vehicles = 0;
  std::string solver;
  std::string status;
  double objective = 0.0;  // NaN when no solution
  double runtime = 0.0;    // seconds
};

struct SweepOptions {
  int customers = 11;
  std::vector<int> fleet_sizes{2, 4, 6, 8, 10};
  int instances_per_point = 50;
  std::uint64_t seed = 1;
  double time_limit = 120.0;
  std::vector<SolverKind> solvers{SolverKind::kExact};
  bool robust = false;
  double epsilon = 0.0;

  std::string flags() const;  // echoed into the CSV header
};

// Instance `id` of a sweep for the given fleet size. Customers and windows
// depend only on (seed, id); the fleet is re-sized to `vehicles` vehicles of
// capacity ceil(2n / vehicles).
Instance sweep_instance(const SweepOptions& options, int id, int vehicles);

using Progress = std::function<void(const BenchRecord&)>;

// Runs every (instance, fleet size, solver) not already in `csv`, appending
// and flushing one row per run. Returns all records in canonical order.
// Throws InputError if `csv` was written with different flags.
std::vector<BenchRecord> run_sweep(const SweepOptions& options, const std::filesystem::path& csv,
                                   const Progress& progress = {});

void write_header(const SweepOptions& options, std::ostream& out);
void write_record(const BenchRecord& r, std::ostream& out);
// Returns the records and the flags line found in the header, if any.
std::vector<BenchRecord> read_records(std::istream& in, std::string* flags = nullptr);

struct PointSummary {
  std::string solver;
  int vehicles = 0;
  int runs = 0;
  int solved = 0;  // runs with a solution
  double median_runtime = 0.0;
  double mean_objective = 0.0;  // over runs with a solution
};

std::vector<PointSummary> summarize(const std::vector<BenchRecord>& records);
double median(std::vector<double> values);

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

void write_svg_chart(std::ostream& out, const std::string& title, const std::string& x_label,
                     const std::string& y_label, const std::vector<Series>& series);

// runtime.svg (median runtime) and objective.svg (mean objective) vs fleet size.
void write_plots(const std::vector<PointSummary>& summary, const std::filesystem::path& dir);

}  // namespace lmd::bench
