#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "lmd/sim/simulator.hpp"
#include "support.hpp"

using namespace lmd;
using namespace lmd::sim;

namespace {

Instance single_arc(double seconds, double window_start = 0.0) {
  DurationMatrix d(2);
  d(0, 1) = d(1, 0) = seconds;
  return make_instance(d, {{window_start, test::kOpen}}, {1});
}

const std::vector<Route> kOneStop{{0, {1}}};

SimConfig unit_speed() {
  SimConfig c;
  c.nominal_speed = 1.0;
  return c;
}

}  // namespace

TEST_CASE("flat arc takes its nominal time") {
  const auto r = simulate(single_arc(50.0), kOneStop, unit_speed());
  CHECK(r.arcs.size() == 1);
  CHECK(r.arcs[0].length == 50.0);
  CHECK(r.arcs[0].realized == 50.0);
  CHECK(r.latency[1] == 50.0);
  CHECK(r.objective == 50.0);
}

TEST_CASE("moderate stretch slows the arc to 62 seconds") {
  SimConfig c = unit_speed();
  c.roughness[{0, 1}] = {{36.0, 0.10}, {14.0, 0.02}};
  const auto r = simulate(single_arc(50.0), kOneStop, c);
  CHECK(r.arcs[0].unmodulated == 50.0);
  CHECK(r.arcs[0].modulated == doctest::Approx(62.0).epsilon(1e-12));
  CHECK(r.latency[1] == doctest::Approx(62.0).epsilon(1e-12));
  c.vmm = false;
  CHECK(simulate(single_arc(50.0), kOneStop, c).latency[1] == 50.0);
}

TEST_CASE("throttling cuts mean vibration") {
  SimConfig c = unit_speed();
  c.roughness[{0, 1}] = {{36.0, 0.10}, {14.0, 0.02}};
  const auto on = simulate(single_arc(50.0), kOneStop, c);
  c.vmm = false;
  const auto off = simulate(single_arc(50.0), kOneStop, c);
  // Hand integration: magnitude v^2 r over time len / v.
  const double off_integral = 1.0 * 0.10 * 36.0 + 1.0 * 0.02 * 14.0;
  const double on_integral = 0.75 * 0.75 * 0.10 * (36.0 / 0.75) + 0.02 * 14.0;
  CHECK(off.vibration_integral == doctest::Approx(off_integral));
  CHECK(on.vibration_integral == doctest::Approx(on_integral));
  CHECK(off.vibration_mean == doctest::Approx(off_integral / 50.0));
  CHECK(on.vibration_mean == doctest::Approx(on_integral / 62.0));
  const double drop = 1.0 - on.vibration_mean / off.vibration_mean;
  CHECK(drop > 0.30);
  CHECK(drop < 0.50);
}

TEST_CASE("vibration scales with kappa") {
  SimConfig c = unit_speed();
  c.roughness[{0, 1}] = {{10.0, 0.3}};
  const double base = simulate(single_arc(20.0), kOneStop, c).vibration_integral;
  c.kappa = 3.0;
  CHECK(simulate(single_arc(20.0), kOneStop, c).vibration_integral == doctest::Approx(3 * base));
}

TEST_CASE("perturbation stays inside the box") {
  std::mt19937_64 rng(77);
  const Instance inst = test::random_instance(rng, 6, 2, 5.0);
  const std::vector<Route> routes{{0, {1, 2, 3}}, {1, {4, 5, 6}}};
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    SimConfig c;
    c.epsilon = 5.0;
    c.seed = seed;
    const auto r = simulate(inst, routes, c);
    for (const auto& a : r.arcs) {
      CHECK(std::abs(a.realized - inst.nominal(a.from, a.to)) <= 5.0 + 1e-9);
      CHECK(a.realized >= 0.0);
    }
  }
}

TEST_CASE("same seed, same run") {
  std::mt19937_64 rng(3);
  const Instance inst = test::random_instance(rng, 5, 1, 2.0);
  const std::vector<Route> routes{{0, {1, 2, 3, 4, 5}}};
  SimConfig c;
  c.epsilon = 2.0;
  c.seed = 11;
  CHECK(simulate(inst, routes, c).latency == simulate(inst, routes, c).latency);
}

TEST_CASE("noise-free replay agrees with the evaluator") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    Instance inst = test::random_instance(rng, 7, 2, 0.0);
    std::uniform_real_distribution<double> svc(0.0, 5.0);
    for (auto& s : inst.service_times) s = svc(rng);
    const std::vector<Route> routes{{0, {3, 1, 4}}, {1, {7, 2, 6, 5}}};
    const auto eval = evaluate_solution(inst, routes, inst.nominal);
    const auto r = simulate(inst, routes, SimConfig{});
    for (int i = 1; i <= 7; ++i) {
      CHECK(r.latency[i] == eval.latency[i]);
      CHECK(r.idle[i] == eval.idle[i]);
    }
    CHECK(r.objective == doctest::Approx(eval.objective).epsilon(1e-12));
    CHECK(r.window_violations == eval.late);
  }
}

TEST_CASE("waiting for a window is not counted") {
  const auto r = simulate(single_arc(10.0, 100.0), kOneStop, unit_speed());
  CHECK(r.arrival[1] == 10.0);
  CHECK(r.latency[1] == 100.0);
  CHECK(r.idle[1] == 90.0);
  CHECK(r.total_idle == 90.0);
  CHECK(r.objective == 100.0);
  CHECK(r.driving_time == 10.0);
}

TEST_CASE("coordinate lengths") {
  DurationMatrix d(2);
  d(0, 1) = d(1, 0) = 1.0;
  Instance inst = make_instance(d, {{0, test::kOpen}}, {1});
  inst.coords = {{0, 0}, {3, 4}};
  SimConfig c = unit_speed();
  c.use_coordinates = true;
  const auto r = simulate(inst, kOneStop, c);
  CHECK(r.arcs[0].length == doctest::Approx(5.0));
  CHECK(r.latency[1] == doctest::Approx(5.0));
}

TEST_CASE("nominal estimation") {
  std::mt19937_64 rng(8);
  const Instance inst = test::random_instance(rng, 4, 1, 0.0);
  SimConfig c = unit_speed();
  SUBCASE("noise free equals geometry") {
    const auto d = estimate_nominals(inst, c, 1);
    for (int i = 0; i <= 4; ++i)
      for (int j = 0; j <= 4; ++j) CHECK(d(i, j) == doctest::Approx(inst.nominal(i, j)));
  }
  SUBCASE("averages stay within epsilon") {
    c.epsilon = 3.0;
    const auto d = estimate_nominals(inst, c, 10);
    for (int i = 0; i <= 4; ++i)
      for (int j = 0; j <= 4; ++j)
        if (i != j) CHECK(std::abs(d(i, j) - inst.nominal(i, j)) <= 3.0);
  }
  SUBCASE("needs coordinates") {
    CHECK_THROWS_AS(estimate_nominals(single_arc(5.0), c), InputError);
    CHECK_THROWS_AS(estimate_nominals(inst, c, 0), InputError);
  }
}

TEST_CASE("config parsing") {
  std::istringstream in(
      "# sim\nnominal_speed = 1.5\nepsilon=2\nseed = 9\nvmm = false\n"
      "roughness.0-1 = 36:0.1, 14:0.02\n");
  const SimConfig c = parse_config(in);
  CHECK(c.nominal_speed == 1.5);
  CHECK(c.epsilon == 2.0);
  CHECK(c.seed == 9);
  CHECK_FALSE(c.vmm);
  REQUIRE(c.roughness.count({0, 1}));
  CHECK(c.roughness.at({0, 1}).size() == 2);
  CHECK(c.roughness.at({0, 1})[1].roughness == 0.02);

  const char* bad[] = {"speed = 1\n", "epsilon = x\n", "vmm = maybe\n", "roughness.0-1 = 36\n",
                       "no equals sign\n", "seed = -1x\n"};
  for (const char* text : bad) {
    CAPTURE(std::string(text));
    std::istringstream b(text);
    CHECK_THROWS_AS(parse_config(b), ConfigError);
  }
}

TEST_CASE("unknown arcs are rejected") {
  SimConfig c = unit_speed();
  c.roughness[{0, 5}] = {{1.0, 0.1}};
  CHECK_THROWS_AS(simulate(single_arc(5.0), kOneStop, c), ConfigError);
}

TEST_CASE("pedestrian replay on the configured arc") {
  SimConfig c = unit_speed();
  c.pedestrians = safety::table_scenario(2);
  const auto plain = simulate(single_arc(30.0), kOneStop, c);
  const auto replay = safety::run_scenario(*c.pedestrians);
  std::size_t expected = 0;
  for (const auto& t : replay.tracks) expected += t.events.size();
  CHECK(plain.vocalizer.size() == expected);
  CHECK(plain.arcs[0].pedestrian_delay == 0.0);
  c.stop_on_red = true;
  const auto stopped = simulate(single_arc(30.0), kOneStop, c);
  CHECK(stopped.arcs[0].pedestrian_delay > 0.0);
  CHECK(stopped.latency[1] == doctest::Approx(30.0 + stopped.arcs[0].pedestrian_delay));
}

TEST_CASE("report csv") {
  const auto r = simulate(single_arc(10.0, 100.0), kOneStop, unit_speed());
  std::ostringstream out;
  write_report_csv(single_arc(10.0, 100.0), r, out);
  CHECK(out.str().rfind("customer,arrival,start,idle,deadline,late\n1,10,100,90,", 0) == 0);
}
