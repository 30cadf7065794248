#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "lmd/heuristic/solver.hpp"
#include "lmd/robust/robust.hpp"
#include "support.hpp"

using namespace lmd;
using namespace lmd::robust;

namespace {

// Depot at the centre of a regular pentagon of customers, radius 40 m.
Instance pentagon(double eps) {
  std::vector<Point2> pts{{0, 0}};
  for (int i = 0; i < 5; ++i) {
    const double a = 2 * std::numbers::pi * i / 5;
    pts.push_back({40 * std::cos(a), 40 * std::sin(a)});
  }
  DurationMatrix d(6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      if (i != j) d(i, j) = std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y);
  Instance inst = make_instance(d, std::vector<TimeWindow>(5, {0, 1000}), {5}, eps);
  inst.coords = pts;
  return inst;
}

}  // namespace

TEST_CASE("zero epsilon worst case is the nominal evaluation") {
  const Instance inst = test::line_instance(3);
  const std::vector<Route> routes{{0, {2, 1, 3}}};
  const auto wc = worst_case_check(inst, routes);
  CHECK(wc.feasible);
  CHECK(wc.objective == evaluate_solution(inst, routes, inst.nominal).objective);
}

TEST_CASE("nominally feasible but not robust") {
  DurationMatrix d(2);
  d(0, 1) = d(1, 0) = 10;
  const Instance inst = make_instance(d, {{0, 12}}, {1}, 5.0);
  const std::vector<Route> routes{{0, {1}}};
  CHECK(evaluate_solution(inst, routes, inst.nominal).feasible());
  const auto wc = worst_case_check(inst, routes);
  CHECK_FALSE(wc.feasible);
  CHECK(wc.evaluation.latency[1] == 15.0);
}

TEST_CASE("worst case on the two-stop line") {
  Instance inst = test::line_instance(2);
  inst.epsilon = 1.0;
  const std::vector<Route> routes{{0, {1, 2}}};
  // l1 = d01 + 1 = 2, l2 = l1 + d12 + 1 = 4
  CHECK(worst_case_check(inst, routes).objective == 6.0);
  CHECK(best_case_objective(inst, routes) == 0.0);
}

TEST_CASE("robust-feasible solutions survive every sample") {
  std::mt19937_64 rng(2);
  int checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Instance inst = test::random_instance(rng, 6, 2, 5.0);
    try {
      const auto sol = heuristic::solve_heuristic(inst, {true, 1, 30}).solution;
      const auto wc = worst_case_check(inst, sol.routes);
      REQUIRE(wc.feasible);
      const auto mc = monte_carlo_report(inst, sol.routes, 300, trial);
      CHECK(mc.feasible_fraction == 1.0);
      CHECK(mc.max_objective <= wc.objective + 1e-9);
      CHECK(mc.min_objective >= best_case_objective(inst, sol.routes) - 1e-9);
      CHECK(mc.max_arc_deviation <= inst.epsilon + 1e-12);
      ++checked;
    } catch (const heuristic::HeuristicFailure&) {
    }
  }
  CHECK(checked > 10);
}

TEST_CASE("field pentagon deviations stay inside five seconds") {
  const Instance inst = pentagon(5.0);
  const std::vector<Route> routes{{0, {1, 2, 3, 4, 5}}};
  const auto mc = monte_carlo_report(inst, routes, 1000, 7);
  CHECK(mc.max_arc_deviation <= 5.0);
  CHECK(mc.max_arc_deviation > 4.5);  // the box is actually explored
  const UncertaintySampler sampler(inst);
  for (int s = 0; s < 50; ++s) CHECK(in_uncertainty_set(inst, sampler.draw(3, s)));
}

TEST_CASE("samples are clamped at zero") {
  DurationMatrix d(2);
  d(0, 1) = d(1, 0) = 1.0;
  const Instance inst = make_instance(d, {{0, 100}}, {1}, 3.0);
  const UncertaintySampler sampler(inst);
  bool hit_zero = false;
  for (int s = 0; s < 200; ++s) {
    const auto m = sampler.draw(1, s);
    CHECK(m(0, 1) >= 0.0);
    hit_zero = hit_zero || m(0, 1) == 0.0;
  }
  CHECK(hit_zero);
}

TEST_CASE("sample streams depend only on seed and sample id") {
  const Instance inst = pentagon(2.0);
  const std::vector<Route> routes{{0, {1, 2, 3, 4, 5}}};
  const auto a = monte_carlo_report(inst, routes, 50, 11);
  const auto b = monte_carlo_report(inst, routes, 80, 11);
  for (int s = 0; s < 50; ++s) CHECK(a.samples[s].objective == b.samples[s].objective);
  const auto c = monte_carlo_report(inst, routes, 50, 12);
  CHECK(a.samples[0].objective != c.samples[0].objective);
}

TEST_CASE("scenario lists must lie in the box") {
  const Instance inst = pentagon(2.0);
  DurationMatrix up = planning_durations(inst, true);
  const UncertaintySampler sampler(inst, {inst.nominal, up});
  for (int s = 0; s < 20; ++s) {
    const auto m = sampler.draw(5, s);
    CHECK((m == inst.nominal || m == up));
  }
  up(0, 1) += 0.5;
  CHECK_THROWS_AS(UncertaintySampler(inst, {up}), InputError);
  CHECK_THROWS_AS(UncertaintySampler(inst, std::vector<DurationRealization>{}), InputError);
}

TEST_CASE("report needs a sample and writes csv") {
  const Instance inst = pentagon(1.0);
  const std::vector<Route> routes{{0, {1, 2, 3, 4, 5}}};
  CHECK_THROWS_AS(monte_carlo_report(inst, routes, 0, 1), InputError);
  const auto mc = monte_carlo_report(inst, routes, 3, 1);
  std::ostringstream out;
  write_report_csv(mc, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "sample_id,feasible,objective");
  int rows = 0;
  while (std::getline(in, line)) {
    CHECK(line.rfind(std::to_string(rows) + ",1,", 0) == 0);
    ++rows;
  }
  CHECK(rows == 3);
}
