#include "lmd/bench/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "lmd/exact/solver.hpp"
#include "lmd/heuristic/solver.hpp"
#include "lmd/instances/generator.hpp"
#include "lmd/milp/model.hpp"

namespace lmd::bench {

const char* to_string(SolverKind s) { return s == SolverKind::kExact ? "exact" : "heuristic"; }

SolverKind parse_solver(const std::string& name) {
  if (name == "exact") return SolverKind::kExact;
  if (name == "heuristic") return SolverKind::kHeuristic;
  throw InputError(fmt::format("unknown solver `{}` (exact|heuristic)", name));
}

namespace {

// Cheap proof that no solution exists: too little capacity, an empty window,
// or a customer that cannot be reached in time even by the fastest chain of
// window-feasible customers from the depot.
bool certainly_infeasible(const Instance& instance, bool robust) {
  const int n = instance.customer_count();
  long total = 0;
  for (int c : instance.fleet) total += c;
  if (total < n) return true;
  const DurationMatrix d = planning_durations(instance, robust);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> earliest(n + 1, inf);
  earliest[0] = 0.0;
  for (bool changed = true; changed;) {
    changed = false;
    for (int p = 0; p <= n; ++p) {
      if (!std::isfinite(earliest[p])) continue;
      for (int i = 1; i <= n; ++i) {
        const double t = std::max(instance.windows[i].start,
                                  earliest[p] + instance.service_times[p] + d(p, i));
        if (t <= instance.windows[i].end && t < earliest[i]) {
          earliest[i] = t;
          changed = true;
        }
      }
    }
  }
  for (int i = 1; i <= n; ++i) {
    if (!std::isfinite(earliest[i])) return true;
  }
  return false;
}

}  // namespace

SolveOutcome solve(const Instance& instance, const SolveRequest& request) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - t0).count(); };
  SolveOutcome out;
  std::optional<std::vector<Route>> warm;
  const heuristic::HeuristicOptions hopt{request.robust, request.seed, request.iteration_budget};
  if (request.solver == SolverKind::kHeuristic) {
    try {
      auto res = heuristic::solve_heuristic(instance, hopt);
      out.status = "feasible";
      out.objective = res.solution.objective;
      out.solution = std::move(res.solution);
    } catch (const heuristic::HeuristicFailure&) {
      out.status = certainly_infeasible(instance, request.robust) ? "infeasible" : "timeout";
    } catch (const InputError&) {
      if (!certainly_infeasible(instance, request.robust)) throw;
      out.status = "infeasible";
    }
    out.seconds = elapsed();
    return out;
  }
  try {
    warm = heuristic::solve_heuristic(instance, hopt).solution.routes;
  } catch (const heuristic::HeuristicFailure&) {
  } catch (const InputError&) {
    // capacity shortfall and similar; the exact search reports infeasibility
  }
  const auto model = milp::build_model(instance, request.robust);
  exact::ExactOptions eopt;
  eopt.time_limit = std::max(0.0, request.time_limit - elapsed());
  eopt.warm_start = warm;
  const auto res = exact::solve_exact(model, eopt);
  out.status = exact::to_string(res.status);
  out.lower_bound = res.lower_bound;
  out.nodes = res.nodes_expanded;
  if (!res.solution.empty() || (res.status == exact::SolveStatus::kOptimal)) {
    out.objective = res.objective;
    out.solution = make_solution(instance, res.solution.routes,
                                 planning_durations(instance, request.robust));
  }
  out.seconds = elapsed();
  return out;
}

std::string SweepOptions::flags() const {
  std::vector<std::string> names;
  for (auto s : solvers) names.push_back(to_string(s));
  return fmt::format(
      "customers={} fleet={} instances={} seed={} time_limit={} solvers={} robust={} epsilon={}",
      customers, fmt::join(fleet_sizes, ","), instances_per_point, seed, time_limit,
      fmt::join(names, ","), robust ? 1 : 0, epsilon);
}

Instance sweep_instance(const SweepOptions& options, int id, int vehicles) {
  const int smallest = *std::min_element(options.fleet_sizes.begin(), options.fleet_sizes.end());
  instances::GeneratorOptions gen;
  gen.epsilon = options.epsilon;
  const std::uint64_t seed = options.seed * 1'000'003ULL + static_cast<std::uint64_t>(id);
  Instance inst = instances::generate_random(options.customers, smallest, seed, gen);
  inst.fleet.assign(vehicles, instances::sweep_capacity(options.customers, vehicles));
  inst.name = fmt::format("sweep-s{}-i{}-k{}", options.seed, id, vehicles);
  return inst;
}

void write_header(const SweepOptions& options, std::ostream& out) {
  out << "# flags " << options.flags() << '\n';
  out << "instance_id,n,vehicles,solver,status,objective,runtime\n";
}

void write_record(const BenchRecord& r, std::ostream& out) {
  out << fmt::format("{},{},{},{},{},{},{}\n", r.instance_id, r.n, r.vehicles, r.solver, r.status,
                     std::isnan(r.objective) ? std::string("nan") : fmt::format("{}", r.objective),
                     r.runtime);
}

std::vector<BenchRecord> read_records(std::istream& in, std::string* flags) {
  std::vector<BenchRecord> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (flags && line.rfind("# flags ", 0) == 0) *flags = line.substr(8);
      continue;
    }
    if (line.rfind("instance_id,", 0) == 0) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 7) {
      if (in.eof()) continue;  // unterminated last line from an interrupted run
      throw InputError(fmt::format("bench csv line {}: expected 7 fields", line_no));
    }
    try {
      BenchRecord r;
      r.instance_id = std::stoi(f[0]);
      r.n = std::stoi(f[1]);
      r.vehicles = std::stoi(f[2]);
      r.solver = f[3];
      r.status = f[4];
      r.objective = f[5] == "nan" ? std::numeric_limits<double>::quiet_NaN() : std::stod(f[5]);
      r.runtime = std::stod(f[6]);
      out.push_back(r);
    } catch (const std::exception&) {
      // a row cut short by an interrupted run; it will be recomputed
      continue;
    }
  }
  return out;
}

namespace {

bool before(const BenchRecord& a, const BenchRecord& b) {
  return std::tie(a.solver, a.vehicles, a.instance_id) <
         std::tie(b.solver, b.vehicles, b.instance_id);
}

}  // namespace

std::vector<BenchRecord> run_sweep(const SweepOptions& options, const std::filesystem::path& csv,
                                   const Progress& progress) {
  if (!(options.time_limit > 0.0)) throw InputError("time_limit must be positive");
  if (options.fleet_sizes.empty() || options.instances_per_point < 1) {
    throw InputError("sweep needs at least one fleet size and one instance");
  }
  std::vector<BenchRecord> records;
  if (std::filesystem::exists(csv) && std::filesystem::file_size(csv) > 0) {
    std::ifstream in(csv);
    std::string flags;
    records = read_records(in, &flags);
    if (flags != options.flags()) {
      throw InputError(fmt::format("{} was written with different flags ({}); refusing to resume",
                                   csv.string(), flags));
    }
  }
  std::set<std::tuple<int, int, std::string>> done;
  for (const auto& r : records) done.insert({r.instance_id, r.vehicles, r.solver});

  // Rewritten on resume so a row cut short by an interruption disappears.
  std::ofstream out(csv, std::ios::trunc);
  if (!out) throw InputError(fmt::format("cannot write {}", csv.string()));
  write_header(options, out);
  for (const auto& r : records) write_record(r, out);
  out.flush();
  for (int id = 0; id < options.instances_per_point; ++id) {
    for (int k : options.fleet_sizes) {
      std::optional<Instance> inst;
      for (SolverKind s : options.solvers) {
        if (done.count({id, k, to_string(s)})) continue;
        if (!inst) inst = sweep_instance(options, id, k);
        SolveRequest req;
        req.solver = s;
        req.robust = options.robust;
        req.time_limit = options.time_limit;
        req.seed = options.seed + static_cast<std::uint64_t>(id);
        const auto res = solve(*inst, req);
        BenchRecord r{id, options.customers, k, to_string(s), res.status,
                      res.solution ? res.objective : std::numeric_limits<double>::quiet_NaN(),
                      res.seconds};
        write_record(r, out);
        out.flush();
        records.push_back(r);
        if (progress) progress(r);
      }
    }
  }
  std::sort(records.begin(), records.end(), before);
  return records;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

std::vector<PointSummary> summarize(const std::vector<BenchRecord>& records) {
  std::map<std::pair<std::string, int>, std::vector<const BenchRecord*>> groups;
  for (const auto& r : records) groups[{r.solver, r.vehicles}].push_back(&r);
  std::vector<PointSummary> out;
  for (const auto& [key, rs] : groups) {
    PointSummary p;
    p.solver = key.first;
    p.vehicles = key.second;
    p.runs = static_cast<int>(rs.size());
    std::vector<double> times;
    double sum = 0.0;
    for (const auto* r : rs) {
      times.push_back(r->runtime);
      if (!std::isnan(r->objective)) {
        ++p.solved;
        sum += r->objective;
      }
    }
    p.median_runtime = median(times);
    p.mean_objective = p.solved ? sum / p.solved : std::numeric_limits<double>::quiet_NaN();
    out.push_back(p);
  }
  return out;
}

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void write_svg_chart(std::ostream& out, const std::string& title, const std::string& x_label,
                     const std::string& y_label, const std::vector<Series>& series) {
  constexpr double W = 640, H = 420, L = 70, R = 150, T = 40, B = 50;
  double x0 = INFINITY, x1 = -INFINITY, y0 = 0.0, y1 = -INFINITY;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y1 = 1;
  if (x1 <= x0) x1 = x0 + 1;
  if (y1 <= y0) y1 = y0 + 1;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
  static const char* kColours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

  out << fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
      "font-size=\"12\">\n",
      W, H);
  out << fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", W, H);
  out << fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                     W / 2, escape(title));
  out << fmt::format(
      "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n"
      "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{3}\" stroke=\"black\"/>\n",
      L, H - B, W - R, T);
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0;
    const double yv = y0 + (y1 - y0) * i / 4.0;
    out << fmt::format("<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"middle\">{:.4g}</text>\n", px(xv),
                       H - B + 18, xv);
    out << fmt::format("<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\">{:.4g}</text>\n", L - 6,
                       py(yv) + 4, yv);
  }
  out << fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                     (L + W - R) / 2, H - 12, escape(x_label));
  out << fmt::format(
      "<text x=\"16\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {0})\">{1}</text>\n",
      (T + H - B) / 2, escape(y_label));
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* colour = kColours[s % 5];
    std::string pts;
    for (const auto& [x, y] : series[s].points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      pts += fmt::format("{:.1f},{:.1f} ", px(x), py(y));
      out << fmt::format("<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"3\" fill=\"{}\"/>\n", px(x), py(y),
                         colour);
    }
    out << fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                       pts, colour);
    out << fmt::format("<text x=\"{}\" y=\"{}\" fill=\"{}\">{}</text>\n", W - R + 10,
                       T + 16 * (s + 1), colour, escape(series[s].name));
  }
  out << "</svg>\n";
}

void write_plots(const std::vector<PointSummary>& summary, const std::filesystem::path& dir) {
  std::map<std::string, Series> runtime, objective;
  for (const auto& p : summary) {
    runtime[p.solver].name = p.solver;
    objective[p.solver].name = p.solver;
    runtime[p.solver].points.emplace_back(p.vehicles, p.median_runtime);
    objective[p.solver].points.emplace_back(p.vehicles, p.mean_objective);
  }
  auto values = [](const std::map<std::string, Series>& m) {
    std::vector<Series> v;
    for (const auto& [k, s] : m) v.push_back(s);
    return v;
  };
  std::filesystem::create_directories(dir);
  std::ofstream rt(dir / "runtime.svg");
  write_svg_chart(rt, "Median running time", "number of vehicles", "seconds", values(runtime));
  std::ofstream ob(dir / "objective.svg");
  write_svg_chart(ob, "Mean objective", "number of vehicles", "total latency (s)",
                  values(objective));
  if (!rt || !ob) throw InputError(fmt::format("cannot write plots to {}", dir.string()));
}

}  // namespace lmd::bench
