#include <doctest.h>

#include <cmath>
#include <random>

#include "lmd/exact/bruteforce.hpp"
#include "lmd/exact/solver.hpp"
#include "lmd/heuristic/solver.hpp"
#include "lmd/instances/generator.hpp"
#include "lmd/milp/model.hpp"
#include "support.hpp"

using namespace lmd;
using namespace lmd::exact;

namespace {

ExactResult run(const Instance& inst, bool robust, ExactOptions opt = {}) {
  return solve_exact(milp::build_model(inst, robust), opt);
}

}  // namespace

TEST_CASE("two customers: nearer first") {
  DurationMatrix d(3);
  d(0, 1) = 1;
  d(0, 2) = 2;
  d(1, 2) = d(2, 1) = 1;
  d(1, 0) = 1;
  d(2, 0) = 2;
  const Instance inst = make_instance(d, {{0, test::kOpen}, {0, test::kOpen}}, {2});
  const auto res = run(inst, false);
  REQUIRE(res.status == SolveStatus::kOptimal);
  CHECK(res.objective == doctest::Approx(3.0));
  REQUIRE(res.solution.routes.size() == 1);
  CHECK(res.solution.routes[0].stops == std::vector<NodeId>{1, 2});
  // the other order, scored independently
  CHECK(test::schedule_cost(inst, d, {2, 1}) == 5.0);
}

TEST_CASE("waiting for a late window") {
  DurationMatrix d(2);
  d(0, 1) = d(1, 0) = 10;
  const Instance inst = make_instance(d, {{100, 200}}, {1});
  const auto res = run(inst, false);
  REQUIRE(res.status == SolveStatus::kOptimal);
  CHECK(res.objective == 100.0);
  CHECK(res.solution.latency[1] == 100.0);
  CHECK(res.solution.idle[1] == 90.0);
}

TEST_CASE("window closing before it opens is infeasible") {
  Instance inst = test::line_instance(3, 2, 3);
  inst.windows[2] = {50.0, 40.0};
  const auto res = run(inst, false);
  CHECK(res.status == SolveStatus::kInfeasible);
  CHECK(res.solution.empty());
  CHECK_FALSE(solve_bruteforce(inst, false).feasible);
}

TEST_CASE("robust durations can make an instance infeasible") {
  DurationMatrix d(2);
  d(0, 1) = d(1, 0) = 10;
  const Instance inst = make_instance(d, {{0, 12}}, {1}, 5.0);
  CHECK(run(inst, false).status == SolveStatus::kOptimal);
  CHECK(run(inst, true).status == SolveStatus::kInfeasible);
}

TEST_CASE("no customers") {
  const Instance inst = make_instance(DurationMatrix(1), {}, {2});
  const auto res = run(inst, false);
  CHECK(res.status == SolveStatus::kOptimal);
  CHECK(res.objective == 0.0);
}

TEST_CASE("capacity shortfall is infeasible") {
  const Instance inst = test::line_instance(4, 2, 1);
  CHECK(run(inst, false).status == SolveStatus::kInfeasible);
}

TEST_CASE("exact matches both oracles on small random instances") {
  std::mt19937_64 rng(99);
  const double eps[] = {0.0, 1.0, 5.0};
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 5;
    const int m = 1 + trial % 3;
    const Instance inst = test::random_instance(rng, n, m, eps[trial % 3]);
    for (bool robust : {false, true}) {
      const double expected = test::enumerate_optimum(inst, planning_durations(inst, robust));
      const auto brute = solve_bruteforce(inst, robust);
      const auto res = run(inst, robust);
      CAPTURE(trial);
      CAPTURE(robust);
      if (!std::isfinite(expected)) {
        CHECK_FALSE(brute.feasible);
        CHECK(res.status == SolveStatus::kInfeasible);
        continue;
      }
      REQUIRE(brute.feasible);
      REQUIRE(res.status == SolveStatus::kOptimal);
      CHECK(brute.objective == doctest::Approx(expected).epsilon(1e-9));
      CHECK(res.objective == doctest::Approx(expected).epsilon(1e-9));
      CHECK(res.lower_bound <= res.objective + 1e-9);
      if (!std::isnan(res.root_lp_bound)) CHECK(res.root_lp_bound <= res.objective + 1e-6);
      const auto ev = evaluate_solution(inst, res.solution.routes, planning_durations(inst, robust));
      CHECK(ev.feasible());
      CHECK(ev.objective == doctest::Approx(res.objective));
    }
  }
}

TEST_CASE("brute force on a unit line") {
  const Instance inst = test::line_instance(3);
  const auto res = solve_bruteforce(inst, false);
  REQUIRE(res.feasible);
  CHECK(res.objective == 6.0);
  CHECK(res.solution.routes[0].stops == std::vector<NodeId>{1, 2, 3});
}

TEST_CASE("single uncapacitated vehicle without windows is the repairman problem") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    Instance inst = test::random_instance(rng, 6, 1, 0.0);
    for (int i = 1; i <= 6; ++i) inst.windows[i] = {0.0, test::kOpen};
    inst.windows[0].end = test::kOpen;
    inst.fleet = {6};
    std::vector<int> all{1, 2, 3, 4, 5, 6};
    const double trp = test::best_order(inst, inst.nominal, all);
    CHECK(solve_bruteforce(inst, false).objective == doctest::Approx(trp));
  }
}

TEST_CASE("brute force refuses large instances") {
  CHECK_THROWS_AS(solve_bruteforce(test::line_instance(kBruteForceMaxCustomers + 1), false),
                  InputError);
}

TEST_CASE("robust oracle objective is at least the nominal one") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    Instance inst = test::random_instance(rng, 5, 2, 2.0);
    const auto nominal = solve_bruteforce(inst, false);
    const auto robust = solve_bruteforce(inst, true);
    if (robust.feasible) {
      REQUIRE(nominal.feasible);
      CHECK(robust.objective >= nominal.objective);
    }
  }
}

TEST_CASE("solver output is deterministic") {
  const Instance inst = instances::generate_random(9, 3, 5);
  const auto a = run(inst, false);
  const auto b = run(inst, false);
  CHECK(a.status == b.status);
  CHECK(a.solution == b.solution);
  CHECK(a.nodes_expanded == b.nodes_expanded);
}

TEST_CASE("time limit keeps the warm start and a valid bound") {
  const Instance inst = instances::generate_random(30, 2, 3);
  const auto warm = heuristic::solve_heuristic(inst).solution;
  ExactOptions opt;
  opt.time_limit = 0.05;
  opt.warm_start = warm.routes;
  const auto res = run(inst, false, opt);
  REQUIRE((res.status == SolveStatus::kFeasibleAtLimit || res.status == SolveStatus::kOptimal));
  CHECK(res.objective <= warm.objective + 1e-9);
  CHECK(res.lower_bound <= res.objective + 1e-9);
}

TEST_CASE("infeasible warm start is ignored") {
  const Instance inst = test::line_instance(3, 1, 3);
  ExactOptions opt;
  opt.warm_start = std::vector<Route>{{0, {1}}};  // leaves customers unserved
  const auto res = run(inst, false, opt);
  REQUIRE(res.status == SolveStatus::kOptimal);
  CHECK(res.objective == 6.0);
}
