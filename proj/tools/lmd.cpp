#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "lmd/bench/bench.hpp"
#include "lmd/core/model.hpp"
#include "lmd/exact/bruteforce.hpp"
#include "lmd/instances/generator.hpp"
#include "lmd/instances/io.hpp"
#include "lmd/instances/solomon.hpp"
#include "lmd/milp/model.hpp"
#include "lmd/perception/vmm.hpp"
#include "lmd/robust/robust.hpp"
#include "lmd/safety/safety.hpp"
#include "lmd/sim/simulator.hpp"

namespace {

using namespace lmd;

enum Exit { kOk = 0, kFailure = 1, kInfeasible = 2, kTimeoutIncumbent = 3, kInputError = 4 };

std::string g_command_line;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError(fmt::format("cannot write {}", path));
  return out;
}

struct InstanceSource {
  std::string path;
  bool solomon = false;
  std::optional<int> vehicles;
  std::optional<int> capacity;
  std::optional<double> epsilon;

  void add(CLI::App* app) {
    app->add_option("-i,--instance", path, "instance file (native or Solomon)")->required();
    app->add_flag("--solomon", solomon, "force the Solomon reader");
    app->add_option("--vehicles", vehicles, "fleet size override");
    app->add_option("--capacity", capacity, "per-vehicle capacity override");
    app->add_option("--epsilon", epsilon, "uncertainty half-width override (seconds)");
  }

  Instance load() const {
    const std::string text = instances::read_text_file(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    const bool native = !solomon && first != std::string::npos &&
                        (text.compare(first, 12, "lmd-instance") == 0 || text[first] == '#');
    Instance inst;
    if (native) {
      std::istringstream in(text);
      inst = instances::load_instance(in);
      if (vehicles || capacity) {
        const int m = vehicles.value_or(inst.vehicle_count());
        const int c = capacity.value_or(inst.fleet.empty() ? 1 : inst.fleet.front());
        inst.fleet.assign(m, c);
      }
    } else {
      instances::SolomonOptions opt;
      opt.vehicles = vehicles;
      opt.capacity = capacity;
      inst = instances::parse_solomon(text, opt);
    }
    if (epsilon) inst.epsilon = *epsilon;
    inst.validate(true);
    return inst;
  }
};

void print_solution(const Solution& sol) {
  for (const auto& r : sol.routes) {
    if (r.stops.empty()) continue;
    std::cout << fmt::format("vehicle {}: 0 -> {} -> end\n", r.vehicle, fmt::join(r.stops, " -> "));
  }
  std::cout << fmt::format("objective {}\n", sol.objective);
}

void save_with_header(const Solution& sol, const std::string& path) {
  auto out = open_out(path);
  out << "# " << g_command_line << '\n';
  instances::save_solution(sol, out);
}


}  // namespace

int main(int argc, char** argv) {
  for (int i = 0; i < argc; ++i) g_command_line += (i ? " " : "") + std::string(argv[i]);

  CLI::App app{"Robust cumulative vehicle routing toolkit for last-mile delivery robots"};
  app.require_subcommand(1);
  int exit_code = kOk;

  // solve
  auto* solve = app.add_subcommand("solve", "solve an instance");
  InstanceSource solve_src;
  solve_src.add(solve);
  std::string solver_name = "exact";
  bool robust = false;
  double time_limit = 60.0;
  std::uint64_t seed = 1;
  int budget = 100;
  std::string solution_out, lp_out;
  solve->add_option("-s,--solver", solver_name, "exact|heuristic")
      ->check(CLI::IsMember({"exact", "heuristic"}));
  solve->add_flag("--robust", robust, "plan against the worst case d+epsilon");
  solve->add_option("-t,--time-limit", time_limit, "seconds")->check(CLI::PositiveNumber);
  solve->add_option("--seed", seed, "heuristic seed");
  solve->add_option("--budget", budget, "heuristic iteration budget")->check(CLI::PositiveNumber);
  solve->add_option("-o,--out", solution_out, "write the solution file");
  solve->add_option("--lp", lp_out, "write the MILP in LP format");
  solve->callback([&] {
    const Instance inst = solve_src.load();
    if (!lp_out.empty()) {
      auto out = open_out(lp_out);
      milp::write_lp(milp::build_model(inst, robust), out);
    }
    bench::SolveRequest req{bench::parse_solver(solver_name), robust, time_limit, seed, budget};
    const auto res = bench::solve(inst, req);
    std::cout << fmt::format("# {}\nstatus {}\nseconds {:.3f}\n", g_command_line, res.status,
                             res.seconds);
    if (res.solution) {
      print_solution(*res.solution);
      if (!solution_out.empty()) save_with_header(*res.solution, solution_out);
    }
    if (res.status == "optimal") exit_code = kOk;
    else if (res.status == "infeasible") exit_code = kInfeasible;
    else if (res.solution && req.solver == bench::SolverKind::kExact) exit_code = kTimeoutIncumbent;
    else if (res.solution) exit_code = kOk;
    else exit_code = kFailure;
  });

  // oracle
  auto* oracle = app.add_subcommand("oracle", "brute-force optimum for tiny instances");
  InstanceSource oracle_src;
  oracle_src.add(oracle);
  bool oracle_robust = false;
  std::string oracle_out;
  oracle->add_flag("--robust", oracle_robust, "score under d+epsilon");
  oracle->add_option("-o,--out", oracle_out, "write the solution file");
  oracle->callback([&] {
    const auto res = exact::solve_bruteforce(oracle_src.load(), oracle_robust);
    std::cout << fmt::format("# {}\nevaluated {}\n", g_command_line, res.evaluated);
    if (!res.feasible) {
      std::cout << "status infeasible\n";
      exit_code = kInfeasible;
      return;
    }
    std::cout << "status optimal\n";
    print_solution(res.solution);
    if (!oracle_out.empty()) save_with_header(res.solution, oracle_out);
  });

  // simulate
  auto* simulate = app.add_subcommand("simulate", "replay a solution");
  InstanceSource sim_src;
  sim_src.add(simulate);
  std::string sim_solution, sim_config, sim_report, sim_summary;
  std::vector<std::string> sim_sets;
  simulate->add_option("--solution", sim_solution, "solution file")->required();
  simulate->add_option("-c,--config", sim_config, "key=value config file");
  simulate->add_option("--set", sim_sets, "key=value override (repeatable)");
  simulate->add_option("--report", sim_report, "per-customer CSV");
  simulate->add_option("--summary", sim_summary, "summary text file (default stdout)");
  simulate->callback([&] {
    const Instance inst = sim_src.load();
    const Solution sol = instances::load_solution_file(sim_solution);
    sim::SimConfig cfg = sim_config.empty() ? sim::SimConfig{} : sim::load_config(sim_config);
    for (const auto& kv : sim_sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw InputError(fmt::format("--set `{}` needs key=value", kv));
      sim::apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    const auto rep = sim::simulate(inst, sol.routes, cfg);
    if (!sim_report.empty()) {
      auto out = open_out(sim_report);
      out << "# " << g_command_line << '\n';
      sim::write_report_csv(inst, rep, out);
    }
    if (sim_summary.empty()) {
      std::cout << "# " << g_command_line << '\n';
      sim::write_summary(rep, std::cout);
    } else {
      auto out = open_out(sim_summary);
      out << "# " << g_command_line << '\n';
      sim::write_summary(rep, out);
    }
  });

  // gen-instance
  auto* gen = app.add_subcommand("gen-instance", "generate a random instance");
  int gen_n = 11, gen_k = 2;
  std::uint64_t gen_seed = 1;
  instances::GeneratorOptions gen_opt;
  std::string gen_out;
  gen->add_option("-n,--customers", gen_n)->check(CLI::PositiveNumber);
  gen->add_option("-k,--vehicles", gen_k)->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed);
  gen->add_option("--epsilon", gen_opt.epsilon);
  gen->add_option("--side", gen_opt.side, "square side in meters");
  gen->add_option("-o,--out", gen_out, "output file (default stdout)");
  gen->callback([&] {
    const Instance inst = instances::generate_random(gen_n, gen_k, gen_seed, gen_opt);
    if (gen_out.empty()) {
      std::cout << "# " << g_command_line << '\n';
      instances::save_instance(inst, std::cout);
    } else {
      auto out = open_out(gen_out);
      out << "# " << g_command_line << '\n';
      instances::save_instance(inst, out);
    }
  });

  // parse
  auto* parse = app.add_subcommand("parse", "read a Solomon file and convert it");
  std::string parse_in, parse_out;
  instances::SolomonOptions parse_opt;
  parse->add_option("file", parse_in, "Solomon format file")->required();
  parse->add_option("--vehicles", parse_opt.vehicles);
  parse->add_option("--capacity", parse_opt.capacity);
  parse->add_option("--epsilon", parse_opt.epsilon);
  parse->add_option("-o,--out", parse_out, "native instance output");
  parse->callback([&] {
    const Instance inst = instances::parse_solomon(instances::read_text_file(parse_in), parse_opt);
    std::cout << fmt::format("{}: {} customers, {} vehicles of capacity {}\n", inst.name,
                             inst.customer_count(), inst.vehicle_count(),
                             inst.fleet.empty() ? 0 : inst.fleet.front());
    if (!parse_out.empty()) {
      auto out = open_out(parse_out);
      out << "# " << g_command_line << '\n';
      instances::save_instance(inst, out);
    }
  });

  // roughness
  auto* rough = app.add_subcommand("roughness", "ground plane, roughness grid and speed factor");
  std::string cloud_in, synth_spec, grid_out;
  double density = 100.0;
  std::uint64_t rough_seed = 1;
  perception::RansacOptions ransac;
  perception::Lookahead look;
  rough->add_option("--cloud", cloud_in, "x y z text file");
  rough->add_option("--synth", synth_spec, "synthetic profile `len:rough,len:rough,...`");
  rough->add_option("--density", density, "points per m^2 for --synth");
  rough->add_option("--seed", rough_seed);
  rough->add_option("--iterations", ransac.iterations)->check(CLI::PositiveNumber);
  rough->add_option("--threshold", ransac.inlier_threshold, "RANSAC inlier threshold (m)");
  rough->add_option("--at", look.origin_x, "x of the vehicle for the lookahead");
  rough->add_option("--grid", grid_out, "write the grid as CSV");
  rough->callback([&] {
    perception::PointCloud cloud;
    if (!cloud_in.empty()) {
      std::ifstream in(cloud_in);
      if (!in) throw InputError(fmt::format("cannot open {}", cloud_in));
      cloud = perception::read_cloud(in);
    } else if (!synth_spec.empty()) {
      std::vector<perception::ProfileSegment> profile;
      std::stringstream ss(synth_spec);
      std::string item;
      while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw InputError("--synth expects len:rough pairs");
        profile.push_back({std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)), {}});
      }
      cloud = perception::synth_cloud(profile, density, rough_seed);
    } else {
      throw InputError("give --cloud or --synth");
    }
    ransac.seed = rough_seed;
    const auto fit = perception::fit_plane_ransac(cloud, ransac);
    const auto grid = perception::roughness_grid(cloud, fit.plane);
    const auto decision = perception::speed_factor(grid, look);
    std::cout << fmt::format("# {}\n", g_command_line);
    std::cout << fmt::format("plane normal {:.6f} {:.6f} {:.6f} offset {:.6f} inliers {}/{}\n",
                             fit.plane.normal.x(), fit.plane.normal.y(), fit.plane.normal.z(),
                             fit.plane.offset, fit.inliers.size(), cloud.size());
    std::cout << fmt::format("cells smooth {} moderate {} rough {}\n",
                             grid.count(perception::Roughness::kSmooth),
                             grid.count(perception::Roughness::kModerate),
                             grid.count(perception::Roughness::kRough));
    if (decision.unknown_terrain) {
      std::cout << "warning: unknown terrain ahead, beta 1\n";
    } else {
      std::cout << fmt::format("lookahead score {:.4f} {} beta {}\n", decision.score,
                               perception::to_string(decision.roughness), decision.beta);
    }
    if (!grid_out.empty()) {
      auto out = open_out(grid_out);
      perception::write_grid_csv(grid, out);
    }
  });

  // classify
  auto* classify = app.add_subcommand("classify", "label pedestrians in a scenario");
  std::string scenario_in, events_out;
  int table = 0;
  safety::ClassifierParams params;
  classify->add_option("--scenario", scenario_in, "scenario file (V/P lines)");
  classify->add_option("--table", table, "built-in field interaction 1..5")
      ->check(CLI::Range(1, 5));
  classify->add_option("--proximity", params.proximity, "red threshold (m)");
  classify->add_option("--collision-radius", params.collision_radius, "blue radius (m)");
  classify->add_option("--events", events_out, "event log CSV");
  classify->callback([&] {
    safety::Scenario sc;
    if (table) {
      sc = safety::table_scenario(table);
    } else if (!scenario_in.empty()) {
      std::ifstream in(scenario_in);
      if (!in) throw InputError(fmt::format("cannot open {}", scenario_in));
      sc = safety::parse_scenario(in);
    } else {
      throw InputError("give --scenario or --table");
    }
    const auto res = safety::run_scenario(sc, params);
    std::cout << fmt::format("# {}\n", g_command_line);
    for (const auto& tr : res.tracks) {
      std::string stream;
      for (const auto& [t, l] : tr.labels) stream += safety::to_char(l);
      std::cout << fmt::format("pedestrian {} phases {} events {} labels {}\n", tr.id,
                               tr.phase_string(), tr.events.size(), stream);
    }
    if (!events_out.empty()) {
      auto out = open_out(events_out);
      safety::write_events_csv(res, out);
    }
  });

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "fleet-size sweep");
  bench::SweepOptions sweep;
  std::vector<std::string> solver_names{"exact"};
  std::string bench_dir = "bench-out";
  bench_cmd->add_option("-n,--customers", sweep.customers)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--fleet", sweep.fleet_sizes, "fleet sizes")->delimiter(',');
  bench_cmd->add_option("--instances", sweep.instances_per_point)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", sweep.seed);
  bench_cmd->add_option("-t,--time-limit", sweep.time_limit)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--solvers", solver_names, "exact,heuristic")->delimiter(',');
  bench_cmd->add_flag("--robust", sweep.robust);
  bench_cmd->add_option("--epsilon", sweep.epsilon);
  bench_cmd->add_option("-o,--out", bench_dir, "output directory");
  bench_cmd->callback([&] {
    sweep.solvers.clear();
    for (const auto& s : solver_names) sweep.solvers.push_back(bench::parse_solver(s));
    std::filesystem::create_directories(bench_dir);
    const auto records = bench::run_sweep(
        sweep, std::filesystem::path(bench_dir) / "bench.csv", [](const bench::BenchRecord& r) {
          std::cerr << fmt::format("instance {} K={} {} {} {:.3f}s\n", r.instance_id, r.vehicles,
                                   r.solver, r.status, r.runtime);
        });
    const auto summary = bench::summarize(records);
    bench::write_plots(summary, bench_dir);
    std::cout << fmt::format("# flags {}\n", sweep.flags());
    std::cout << "solver,vehicles,runs,solved,median_runtime,mean_objective\n";
    for (const auto& p : summary) {
      std::cout << fmt::format("{},{},{},{},{:.6f},{:.4f}\n", p.solver, p.vehicles, p.runs,
                               p.solved, p.median_runtime, p.mean_objective);
    }
  });

  // robust
  auto* robust_cmd = app.add_subcommand("robust", "worst case and Monte-Carlo check of a solution");
  InstanceSource robust_src;
  robust_src.add(robust_cmd);
  std::string robust_solution, robust_csv;
  int samples = 1000;
  std::uint64_t robust_seed = 1;
  robust_cmd->add_option("--solution", robust_solution, "solution file")->required();
  robust_cmd->add_option("--samples", samples)->check(CLI::PositiveNumber);
  robust_cmd->add_option("--seed", robust_seed);
  robust_cmd->add_option("--csv", robust_csv, "per-sample CSV");
  robust_cmd->callback([&] {
    const Instance inst = robust_src.load();
    const Solution sol = instances::load_solution_file(robust_solution);
    const auto wc = robust::worst_case_check(inst, sol.routes);
    const auto mc = robust::monte_carlo_report(inst, sol.routes, samples, robust_seed);
    std::cout << fmt::format("# {}\n", g_command_line);
    std::cout << fmt::format("worst_case feasible {} objective {}\n", wc.feasible, wc.objective);
    if (!wc.feasible) std::cout << "  " << wc.evaluation.describe() << '\n';
    std::cout << fmt::format(
        "monte_carlo samples {} feasible_fraction {} objective min {} mean {} max {}\n", samples,
        mc.feasible_fraction, mc.min_objective, mc.mean_objective, mc.max_objective);
    if (!robust_csv.empty()) {
      auto out = open_out(robust_csv);
      out << "# " << g_command_line << '\n';
      robust::write_report_csv(mc, out);
    }
    if (!wc.feasible) exit_code = kInfeasible;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInputError;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return exit_code;
}
