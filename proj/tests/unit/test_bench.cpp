#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "lmd/bench/bench.hpp"
#include "support.hpp"

using namespace lmd;
using namespace lmd::bench;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "lmd_test_bench";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  fs::remove_all(p);
  return p;
}

SweepOptions tiny() {
  SweepOptions o;
  o.customers = 5;
  o.fleet_sizes = {2, 3};
  o.instances_per_point = 2;
  o.time_limit = 10.0;
  o.solvers = {SolverKind::kExact, SolverKind::kHeuristic};
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("solver names") {
  CHECK(parse_solver("exact") == SolverKind::kExact);
  CHECK(parse_solver("heuristic") == SolverKind::kHeuristic);
  CHECK_THROWS_AS(parse_solver("cplex"), InputError);
}

TEST_CASE("exact solve matches enumeration") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const Instance inst = test::random_instance(rng, 5, 2, 0.0);
    const double want = test::enumerate_optimum(inst, inst.nominal);
    const auto got = solve(inst, {});
    if (std::isinf(want)) {
      CHECK(got.status == "infeasible");
    } else {
      REQUIRE(got.status == "optimal");
      CHECK(got.objective == doctest::Approx(want));
      CHECK(got.lower_bound <= got.objective + 1e-6);
    }
  }
}

TEST_CASE("another vehicle never hurts") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 8; ++trial) {
    Instance inst = test::random_instance(rng, 6, 1, 0.0);
    const auto one = solve(inst, {});
    inst.fleet.push_back(3);
    const auto two = solve(inst, {});
    CHECK(test::enumerate_optimum(inst, inst.nominal) ==
          doctest::Approx(two.solution ? two.objective : INFINITY));
    if (one.solution) {
      REQUIRE(two.solution);
      CHECK(two.objective <= one.objective + 1e-9);
    }
  }
}

TEST_CASE("sweep instances share customers across fleet sizes") {
  const SweepOptions o = tiny();
  const Instance a = sweep_instance(o, 1, 2);
  const Instance b = sweep_instance(o, 1, 3);
  CHECK(a.windows == b.windows);
  CHECK(a.nominal(0, 3) == b.nominal(0, 3));
  CHECK(a.fleet == std::vector<int>{5, 5});
  CHECK(b.fleet == std::vector<int>{4, 4, 4});
  CHECK_FALSE(sweep_instance(o, 0, 2).windows == a.windows);
}

TEST_CASE("sweep writes one row per run and resumes") {
  const fs::path csv = scratch("sweep.csv");
  const SweepOptions o = tiny();
  int calls = 0;
  const auto first = run_sweep(o, csv, [&](const BenchRecord&) { ++calls; });
  CHECK(calls == 2 * 2 * 2);
  CHECK(first.size() == 8);
  for (const auto& r : first) CHECK(r.n == 5);

  calls = 0;
  CHECK(run_sweep(o, csv, [&](const BenchRecord&) { ++calls; }).size() == 8);
  CHECK(calls == 0);

  // Interrupted mid-row: keep header + three rows and half of the fourth.
  std::istringstream lines(slurp(csv));
  std::string kept, line;
  for (int i = 0; i < 5 && std::getline(lines, line); ++i) kept += line + '\n';
  std::getline(lines, line);
  kept += line.substr(0, 4);
  std::ofstream(csv, std::ios::trunc) << kept;
  calls = 0;
  const auto resumed = run_sweep(o, csv, [&](const BenchRecord&) { ++calls; });
  CHECK(calls == 5);
  CHECK(resumed.size() == 8);
  std::ifstream again(csv);
  CHECK(read_records(again).size() == 8);

  SweepOptions other = o;
  other.seed = 2;
  CHECK_THROWS_AS(run_sweep(other, csv), InputError);
}

TEST_CASE("csv records round trip") {
  std::ostringstream out;
  write_header(tiny(), out);
  write_record({3, 11, 4, "exact", "optimal", 123.5, 0.25}, out);
  write_record({4, 11, 4, "exact", "timeout", NAN, 120.0}, out);
  std::istringstream in(out.str());
  std::string flags;
  const auto recs = read_records(in, &flags);
  CHECK(flags == tiny().flags());
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].objective == 123.5);
  CHECK(std::isnan(recs[1].objective));
  std::istringstream bad("1,2,3\n4,5,6,7,8,9,10\n");
  CHECK_THROWS_AS(read_records(bad), InputError);
}

TEST_CASE("median") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
  CHECK(std::isnan(median({})));
}

TEST_CASE("summary and plots") {
  std::vector<BenchRecord> recs{{0, 5, 2, "exact", "optimal", 10, 1.0},
                                {1, 5, 2, "exact", "optimal", 20, 3.0},
                                {2, 5, 2, "exact", "timeout", NAN, 9.0},
                                {0, 5, 4, "exact", "optimal", 8, 0.5}};
  const auto s = summarize(recs);
  REQUIRE(s.size() == 2);
  CHECK(s[0].vehicles == 2);
  CHECK(s[0].runs == 3);
  CHECK(s[0].solved == 2);
  CHECK(s[0].median_runtime == 3.0);
  CHECK(s[0].mean_objective == 15.0);
  const fs::path dir = scratch("plots");
  fs::create_directories(dir);
  write_plots(s, dir);
  const std::string svg = slurp(dir / "runtime.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("exact") != std::string::npos);
  CHECK(fs::exists(dir / "objective.svg"));
}

TEST_CASE("heuristic runs report provable infeasibility") {
  DurationMatrix d(3);
  d(0, 1) = d(1, 0) = 5.0;
  d(0, 2) = d(2, 0) = 1.0;
  d(1, 2) = d(2, 1) = 1.0;
  SolveRequest req;
  req.solver = SolverKind::kHeuristic;
  // Customer 1 closes at 1.5; the quickest way in (via 2) arrives at 2.
  const Instance late = make_instance(d, {{0, 1.5}, {0, 100}}, {2});
  CHECK(solve(late, req).status == "infeasible");
  // Via 2 it is reachable at 2, and only one order of the pair is then feasible.
  const Instance ok = make_instance(d, {{0, 2.0}, {0, 100}}, {2});
  const auto res = solve(ok, req);
  CHECK(res.status == "feasible");
  CHECK(res.objective == doctest::Approx(3.0));
  const Instance short_fleet = make_instance(d, {{0, 100}, {0, 100}}, {1});
  CHECK(solve(short_fleet, req).status == "infeasible");
  CHECK(solve(short_fleet, {}).status == "infeasible");
}
