#include <doctest.h>

#include <random>

#include "lmd/core/model.hpp"
#include "support.hpp"

using namespace lmd;

namespace {

Instance two_stop(double s2 = 0.0, double f2 = test::kOpen) {
  DurationMatrix d(3);
  d(0, 1) = 10;
  d(1, 2) = 5;
  d(0, 2) = 12;
  d(2, 1) = 5;
  d(1, 0) = 10;
  d(2, 0) = 12;
  return make_instance(d, {{0, test::kOpen}, {s2, f2}}, {2});
}

}  // namespace

TEST_CASE("route latencies are cumulative without waiting") {
  const Instance inst = two_stop();
  const auto ev = evaluate_route(inst, {0, {1, 2}}, inst.nominal);
  REQUIRE(ev.latency.size() == 2);
  CHECK(ev.latency[0] == 10.0);
  CHECK(ev.latency[1] == 15.0);
  CHECK(ev.objective == 25.0);
  CHECK(ev.idle[0] == 0.0);
  CHECK(ev.idle[1] == 0.0);
  CHECK(ev.feasible());
}

TEST_CASE("early arrival waits for the window and idle is not charged") {
  const Instance inst = two_stop(20.0);
  const auto ev = evaluate_route(inst, {0, {1, 2}}, inst.nominal);
  CHECK(ev.latency[1] == 20.0);
  CHECK(ev.idle[1] == 5.0);
  CHECK(ev.objective == 30.0);
}

TEST_CASE("late arrival breaks the window") {
  const Instance inst = two_stop(0.0, 12.0);
  const auto ev = evaluate_route(inst, {0, {1, 2}}, inst.nominal);
  CHECK_FALSE(ev.windows_ok);
  CHECK(ev.late_stops == std::vector<NodeId>{2});
}

TEST_CASE("unknown node id is an input error") {
  const Instance inst = two_stop();
  CHECK_THROWS_AS(evaluate_route(inst, {0, {1, 7}}, inst.nominal), InputError);
  CHECK_THROWS_AS(evaluate_route(inst, {0, {0}}, inst.nominal), InputError);
}

TEST_CASE("empty route is vacuously feasible") {
  const Instance inst = two_stop();
  const auto ev = evaluate_route(inst, {0, {}}, inst.nominal);
  CHECK(ev.latency.empty());
  CHECK(ev.feasible());
  CHECK(ev.objective == 0.0);
}

TEST_CASE("parallel single-customer routes") {
  DurationMatrix d(3, 7.0);
  d(0, 0) = d(1, 1) = d(2, 2) = 0;
  const Instance inst = make_instance(d, {{0, test::kOpen}, {0, test::kOpen}}, {1, 1});
  const std::vector<Route> routes{{0, {1}}, {1, {2}}};
  const auto ev = evaluate_solution(inst, routes, inst.nominal);
  CHECK(ev.feasible());
  CHECK(ev.objective == 14.0);
}

TEST_CASE("solution evaluation reports unserved, duplicates and capacity") {
  const Instance inst = test::line_instance(3, 2, 2);
  SUBCASE("unserved") {
    const std::vector<Route> routes{{0, {1, 3}}};
    const auto ev = evaluate_solution(inst, routes, inst.nominal);
    CHECK(ev.unserved == std::vector<NodeId>{2});
    CHECK(ev.describe().find("unserved") != std::string::npos);
  }
  SUBCASE("over capacity") {
    const std::vector<Route> routes{{0, {1, 2, 3}}};
    const auto ev = evaluate_solution(inst, routes, inst.nominal);
    CHECK(ev.over_capacity == std::vector<int>{0});
    CHECK_FALSE(ev.feasible());
  }
  SUBCASE("duplicate") {
    const std::vector<Route> routes{{0, {1, 2}}, {1, {2, 3}}};
    const auto ev = evaluate_solution(inst, routes, inst.nominal);
    CHECK(ev.duplicated == std::vector<NodeId>{2});
  }
  SUBCASE("bad vehicle") {
    const std::vector<Route> routes{{5, {1, 2, 3}}};
    CHECK_FALSE(evaluate_solution(inst, routes, inst.nominal).bad_vehicles.empty());
  }
}

TEST_CASE("instance validation") {
  Instance inst = test::line_instance(2);
  CHECK_NOTHROW(inst.validate());
  SUBCASE("window start after end") {
    inst.windows[1] = {10, 5};
    CHECK_THROWS_AS(inst.validate(), InputError);
    CHECK_NOTHROW(inst.validate(true));
  }
  SUBCASE("negative duration") {
    inst.nominal(0, 1) = -1;
    CHECK_THROWS_AS(inst.validate(), InputError);
  }
  SUBCASE("negative epsilon") {
    inst.epsilon = -0.5;
    CHECK_THROWS_AS(inst.validate(), InputError);
  }
  SUBCASE("matrix size mismatch") {
    inst.nominal = DurationMatrix(5);
    CHECK_THROWS_AS(inst.validate(), InputError);
  }
}

TEST_CASE("terminal arcs cost nothing") {
  const Instance inst = test::line_instance(3);
  for (int i = 0; i <= 3; ++i) CHECK(inst.nominal_duration(i, inst.terminal()) == 0.0);
}

TEST_CASE("planning durations shift every arc by epsilon") {
  Instance inst = test::line_instance(3);
  inst.epsilon = 2.5;
  const auto nominal = planning_durations(inst, false);
  const auto robust = planning_durations(inst, true);
  CHECK(nominal == inst.nominal);
  for (int i = 0; i <= 3; ++i)
    for (int j = 0; j <= 3; ++j)
      CHECK(robust(i, j) == (i == j ? 0.0 : inst.nominal(i, j) + 2.5));
}

TEST_CASE("earliest start is pointwise minimal among feasible schedules") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> slack(0.0, 15.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Instance inst = test::random_instance(rng, 5, 1, 0.0);
    std::vector<NodeId> order{1, 2, 3, 4, 5};
    std::shuffle(order.begin(), order.end(), rng);
    const auto ev = evaluate_route(inst, {0, order}, inst.nominal);
    // any other schedule: start no earlier than travel allows, plus slack
    double t = 0.0;
    int prev = 0;
    bool feasible = true;
    std::vector<double> other;
    for (int c : order) {
      t = std::max(inst.windows[c].start, t + inst.nominal(prev, c)) + slack(rng);
      feasible = feasible && t <= inst.windows[c].end;
      other.push_back(t);
      prev = c;
    }
    if (!feasible) continue;
    REQUIRE(ev.windows_ok);
    for (std::size_t i = 0; i < order.size(); ++i) CHECK(ev.latency[i] <= other[i]);
  }
}

TEST_CASE("latencies never decrease when an arc gets longer") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> bump(0.0, 20.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Instance inst = test::random_instance(rng, 6, 1, 0.0);
    std::vector<NodeId> order{1, 2, 3, 4, 5, 6};
    std::shuffle(order.begin(), order.end(), rng);
    const auto before = evaluate_route(inst, {0, order}, inst.nominal);
    DurationMatrix longer = inst.nominal;
    const std::size_t pos = rng() % order.size();
    const int from = pos == 0 ? 0 : order[pos - 1];
    longer(from, order[pos]) += bump(rng);
    const auto after = evaluate_route(inst, {0, order}, longer);
    for (std::size_t i = 0; i < order.size(); ++i) CHECK(after.latency[i] >= before.latency[i]);
  }
}

TEST_CASE("solution objective is the sum of route objectives") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const Instance inst = test::random_instance(rng, 7, 3, 0.0);
    std::vector<Route> routes{{0, {}}, {1, {}}, {2, {}}};
    for (int c = 1; c <= 7; ++c) routes[rng() % 3].stops.push_back(c);
    double sum = 0.0;
    for (const auto& r : routes) sum += evaluate_route(inst, r, inst.nominal).objective;
    CHECK(evaluate_solution(inst, routes, inst.nominal).objective == doctest::Approx(sum).epsilon(1e-12));
  }
}

TEST_CASE("make_solution packages the schedule") {
  const Instance inst = two_stop(20.0);
  const Solution sol = make_solution(inst, {{0, {1, 2}}}, inst.nominal);
  CHECK(sol.objective == 30.0);
  CHECK(sol.latency[2] == 20.0);
  CHECK(sol.idle[2] == 5.0);
}
