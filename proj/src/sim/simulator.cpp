#include "lmd/sim/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "lmd/perception/vmm.hpp"

namespace lmd::sim {

namespace {

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  return std::mt19937_64(seq);
}

double draw_perturbation(std::mt19937_64& rng, double eps) {
  if (eps <= 0.0) return 0.0;
  return std::uniform_real_distribution<double>(-eps, eps)(rng);
}

void check_config(const Instance& instance, const SimConfig& config) {
  if (!(config.nominal_speed > 0.0)) throw ConfigError("nominal_speed must be positive");
  if (!(config.epsilon >= 0.0)) throw ConfigError("epsilon must be non-negative");
  const int nodes = instance.customer_count() + 1;
  auto check_arc = [&](const ArcKey& a) {
    if (a.first < 0 || a.first >= nodes || a.second < 0 || a.second >= nodes ||
        a.first == a.second) {
      throw ConfigError(fmt::format("config references unknown arc {}-{}", a.first, a.second));
    }
  };
  for (const auto& [arc, segs] : config.roughness) {
    check_arc(arc);
    for (const auto& s : segs) {
      if (!(s.length >= 0.0) || !(s.roughness >= 0.0)) {
        throw ConfigError(fmt::format("arc {}-{}: negative segment", arc.first, arc.second));
      }
    }
  }
  if (config.pedestrians) check_arc(config.pedestrian_arc);
  if (config.use_coordinates && !instance.has_coords()) {
    throw ConfigError("use_coordinates set but the instance has no coordinates");
  }
}

double arc_length(const Instance& instance, const SimConfig& config, NodeId i, NodeId j) {
  if (config.use_coordinates) {
    return std::hypot(instance.coords[i].x - instance.coords[j].x,
                      instance.coords[i].y - instance.coords[j].y);
  }
  return instance.nominal(i, j) * config.nominal_speed;
}

double base_time(const Instance& instance, const SimConfig& config, NodeId i, NodeId j) {
  return config.use_coordinates ? arc_length(instance, config, i, j) / config.nominal_speed
                                : instance.nominal(i, j);
}

}  // namespace

ArcProfile traverse(double length, double base, std::span<const RoughSegment> segments,
                    const SimConfig& config) {
  ArcProfile out;
  const double v = config.nominal_speed;
  out.unmodulated = base;
  double extra = 0.0;
  double covered = 0.0;
  double clock = 0.0;
  for (const auto& seg : segments) {
    const double len = std::min(seg.length, std::max(0.0, length - covered));
    if (len <= 0.0) break;
    const double beta =
        config.vmm ? perception::beta_for(perception::classify_roughness(seg.roughness)) : 1.0;
    const double speed = beta * v;
    const double dt = len / speed;
    extra += len * (1.0 / beta - 1.0) / v;
    out.vibration.push_back({clock, dt, config.kappa * speed * speed * seg.roughness});
    clock += dt;
    covered += len;
  }
  if (length - covered > 0.0) {
    out.vibration.push_back({clock, (length - covered) / v, 0.0});
  }
  out.modulated = base + extra;
  return out;
}

SimReport simulate(const Instance& instance, std::span<const Route> routes,
                   const SimConfig& config) {
  instance.validate(true);
  check_config(instance, config);
  const int n = instance.customer_count();
  SimReport rep;
  rep.latency.assign(n + 1, 0.0);
  rep.idle.assign(n + 1, 0.0);
  rep.arrival.assign(n + 1, 0.0);

  std::optional<safety::ScenarioResult> peds;
  double red_delay = 0.0;
  if (config.pedestrians) {
    peds = safety::run_scenario(*config.pedestrians);
    if (config.stop_on_red) {
      // Each red observation holds the vehicle for one observation period.
      for (const auto& [id, obs] : config.pedestrians->pedestrians) {
        const auto it = std::find_if(peds->tracks.begin(), peds->tracks.end(),
                                     [id = id](const auto& t) { return t.id == id; });
        if (it == peds->tracks.end() || obs.size() < 2) continue;
        const double period = (obs.back().t - obs.front().t) / (obs.size() - 1);
        for (const auto& [t, label] : it->labels) {
          if (label == safety::Label::kRed) red_delay += period;
        }
      }
    }
  }

  static const std::vector<RoughSegment> kFlat;
  for (const Route& route : routes) {
    auto rng = stream(config.seed, static_cast<std::uint64_t>(route.vehicle));
    double clock = instance.service_times[0];
    NodeId prev = 0;
    for (NodeId stop : route.stops) {
      if (stop < 1 || stop > n) throw InputError(fmt::format("unknown customer {}", stop));
      const auto rit = config.roughness.find({prev, stop});
      const auto& segs = rit == config.roughness.end() ? kFlat : rit->second;
      const double len = arc_length(instance, config, prev, stop);
      const ArcProfile prof = traverse(len, base_time(instance, config, prev, stop), segs, config);
      ArcTraversal arc;
      arc.vehicle = route.vehicle;
      arc.from = prev;
      arc.to = stop;
      arc.depart = clock;
      arc.length = len;
      arc.unmodulated = prof.unmodulated;
      arc.modulated = prof.modulated;
      arc.perturbation = draw_perturbation(rng, config.epsilon);
      if (peds && ArcKey{prev, stop} == config.pedestrian_arc) {
        arc.pedestrian_delay = red_delay;
        for (const auto& tr : peds->tracks) {
          for (auto ev : tr.events) {
            ev.t += clock;
            rep.vocalizer.push_back(ev);
          }
        }
      }
      arc.realized = std::max(0.0, arc.modulated + arc.perturbation) + arc.pedestrian_delay;
      for (const auto& vs : prof.vibration) {
        const double scale = prof.modulated > 0.0 ? std::max(0.0, arc.modulated + arc.perturbation) / prof.modulated : 0.0;
        VibrationSample s{clock + vs.time * scale, vs.duration * scale, vs.magnitude};
        rep.vibration.push_back(s);
        rep.vibration_integral += s.magnitude * s.duration;
        rep.driving_time += s.duration;
      }
      rep.arcs.push_back(arc);

      const double arrive = clock + arc.realized;
      const double start = std::max(instance.windows[stop].start, arrive);
      rep.arrival[stop] = arrive;
      rep.latency[stop] = start;
      rep.idle[stop] = start - arrive;
      if (start > instance.windows[stop].end) rep.window_violations.push_back(stop);
      clock = start + instance.service_times[stop];
      prev = stop;
    }
  }
  for (int i = 1; i <= n; ++i) {
    rep.objective += rep.latency[i];
    rep.total_idle += rep.idle[i];
  }
  std::sort(rep.window_violations.begin(), rep.window_violations.end());
  rep.vibration_mean = rep.driving_time > 0.0 ? rep.vibration_integral / rep.driving_time : 0.0;
  return rep;
}

DurationMatrix estimate_nominals(const Instance& instance, const SimConfig& config,
                                 int repetitions) {
  if (!instance.has_coords()) throw InputError("estimating nominal times needs coordinates");
  if (repetitions < 1) throw InputError("repetitions must be at least 1");
  if (!(config.nominal_speed > 0.0)) throw ConfigError("nominal_speed must be positive");
  const int nodes = static_cast<int>(instance.coords.size());
  SimConfig geo = config;
  geo.use_coordinates = true;
  DurationMatrix out(nodes);
  static const std::vector<RoughSegment> kFlat;
  for (int i = 0; i < nodes; ++i) {
    for (int j = 0; j < nodes; ++j) {
      if (i == j) continue;
      const auto rit = config.roughness.find({i, j});
      const auto& segs = rit == config.roughness.end() ? kFlat : rit->second;
      const double len = arc_length(instance, geo, i, j);
      const double t = traverse(len, len / geo.nominal_speed, segs, geo).modulated;
      auto rng = stream(config.seed, static_cast<std::uint64_t>(i) * nodes + j, 1);
      double sum = 0.0;
      for (int r = 0; r < repetitions; ++r) {
        sum += std::max(0.0, t + draw_perturbation(rng, config.epsilon));
      }
      out(i, j) = sum / repetitions;
    }
  }
  return out;
}

namespace {

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw ConfigError(fmt::format("{}: `{}` is not a boolean", key, v));
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("{}: `{}` is not a number", key, v));
  }
}

ArcKey parse_arc(const std::string& key, const std::string& text) {
  const auto dash = text.find('-');
  if (dash == std::string::npos) throw ConfigError(fmt::format("{}: arc must be `i-j`", key));
  try {
    return {std::stoi(text.substr(0, dash)), std::stoi(text.substr(dash + 1))};
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("{}: arc must be `i-j`", key));
  }
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

void apply_setting(SimConfig& config, const std::string& key, const std::string& value,
                   const std::filesystem::path& base_dir) {
  if (key == "nominal_speed") {
    config.nominal_speed = parse_double(key, value);
  } else if (key == "epsilon") {
    config.epsilon = parse_double(key, value);
  } else if (key == "seed") {
    const char* last = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), last, config.seed);
    if (ec != std::errc{} || ptr != last || value.empty()) {
      throw ConfigError(fmt::format("seed: `{}` is not an unsigned integer", value));
    }
  } else if (key == "kappa") {
    config.kappa = parse_double(key, value);
  } else if (key == "vmm") {
    config.vmm = parse_bool(key, value);
  } else if (key == "use_coordinates") {
    config.use_coordinates = parse_bool(key, value);
  } else if (key == "stop_on_red") {
    config.stop_on_red = parse_bool(key, value);
  } else if (key == "pedestrian_arc") {
    config.pedestrian_arc = parse_arc(key, value);
  } else if (key == "pedestrian_scenario") {
    std::filesystem::path p(value);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    std::ifstream in(p);
    if (!in) throw ConfigError(fmt::format("cannot open scenario {}", p.string()));
    config.pedestrians = safety::parse_scenario(in);
  } else if (key.rfind("roughness.", 0) == 0) {
    // roughness.i-j = length:roughness, length:roughness, ...
    const ArcKey arc = parse_arc(key, key.substr(10));
    std::vector<RoughSegment> segs;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      const auto colon = item.find(':');
      if (colon == std::string::npos) {
        throw ConfigError(fmt::format("{}: segment `{}` must be length:roughness", key, item));
      }
      segs.push_back({parse_double(key, item.substr(0, colon)),
                      parse_double(key, item.substr(colon + 1))});
    }
    config.roughness[arc] = std::move(segs);
  } else {
    throw ConfigError(fmt::format("unknown config key `{}`", key));
  }
}

SimConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  SimConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("line {}: expected key=value", line_no));
    }
    try {
      apply_setting(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), base_dir);
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("line {}: {}", line_no, e.what()));
    }
  }
  return config;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open {}", path.string()));
  return parse_config(in, path.parent_path());
}

void write_report_csv(const Instance& instance, const SimReport& report, std::ostream& out) {
  out << "customer,arrival,start,idle,deadline,late\n";
  for (int i = 1; i < static_cast<int>(report.latency.size()); ++i) {
    const bool late = report.latency[i] > instance.windows[i].end;
    out << fmt::format("{},{},{},{},{},{}\n", i, report.arrival[i], report.latency[i],
                       report.idle[i], instance.windows[i].end, late ? 1 : 0);
  }
}

void write_summary(const SimReport& report, std::ostream& out) {
  out << fmt::format("objective {:.6f}\n", report.objective);
  out << fmt::format("idle {:.6f}\n", report.total_idle);
  out << fmt::format("driving_time {:.6f}\n", report.driving_time);
  out << fmt::format("window_violations {}\n", report.window_violations.size());
  out << fmt::format("vibration_mean {:.6f}\n", report.vibration_mean);
  out << fmt::format("vibration_integral {:.6f}\n", report.vibration_integral);
  out << fmt::format("vocalizer_events {}\n", report.vocalizer.size());
  for (const auto& a : report.arcs) {
    out << fmt::format("arc {} {}->{} depart {:.3f} realized {:.3f} (unmodulated {:.3f})\n",
                       a.vehicle, a.from, a.to, a.depart, a.realized, a.unmodulated);
  }
}

}  // namespace lmd::sim
