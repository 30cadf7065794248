#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lmd/core/model.hpp"
#include "lmd/safety/safety.hpp"

namespace lmd::sim {

class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

struct RoughSegment {
  double length = 0.0;     // meters
  double roughness = 0.0;  // mean point-plane distance, meters
};

using ArcKey = std::pair<NodeId, NodeId>;

struct SimConfig {
  double nominal_speed = 1.2;  // m/s
  double epsilon = 0.0;        // perturbation half-width, seconds
  std::uint64_t seed = 1;
  double kappa = 1.0;          // vibration coefficient
  bool vmm = true;             // throttle by β over rough segments
  // Arc length from node coordinates instead of d̄ * nominal_speed.
  bool use_coordinates = false;
  // Roughness along an arc from its tail; the uncovered remainder is flat.
  std::map<ArcKey, std::vector<RoughSegment>> roughness;
  // Pedestrian replay, clocked from the start of `pedestrian_arc`.
  std::optional<safety::Scenario> pedestrians;
  ArcKey pedestrian_arc{0, 1};
  bool stop_on_red = false;
};

struct ArcTraversal {
  int vehicle = 0;
  NodeId from = 0, to = 0;
  double depart = 0.0;
  double length = 0.0;
  double unmodulated = 0.0;  // length / speed
  double modulated = 0.0;    // with β applied
  double perturbation = 0.0;
  double pedestrian_delay = 0.0;
  double realized = 0.0;
};

struct VibrationSample {
  double time = 0.0;       // segment start
  double duration = 0.0;
  double magnitude = 0.0;  // κ v² roughness
};

struct SimReport {
  std::vector<double> latency;  // size n+1, index 0 unused
  std::vector<double> idle;
  std::vector<double> arrival;
  double objective = 0.0;
  double total_idle = 0.0;
  std::vector<NodeId> window_violations;
  std::vector<ArcTraversal> arcs;
  std::vector<VibrationSample> vibration;
  double vibration_integral = 0.0;  // Σ magnitude * duration
  double vibration_mean = 0.0;      // integral / driving time
  double driving_time = 0.0;
  std::vector<safety::VocalizerEvent> vocalizer;
};

// Replays the routes with earliest-start service. Throws ConfigError when the
// config names arcs the instance does not have.
SimReport simulate(const Instance& instance, std::span<const Route> routes,
                   const SimConfig& config);

// Traversal time of a single arc of the given length.
struct ArcProfile {
  double unmodulated = 0.0;
  double modulated = 0.0;
  std::vector<VibrationSample> vibration;  // times relative to the arc start
};
ArcProfile traverse(double length, double base_time, std::span<const RoughSegment> segments,
                    const SimConfig& config);

// Drives every arc `repetitions` times with noise and averages, the way
// nominal times are calibrated in the field. Needs node coordinates.
DurationMatrix estimate_nominals(const Instance& instance, const SimConfig& config,
                                 int repetitions = 10);

// Flat key=value file; '#' starts a comment. Relative scenario paths resolve
// against `base_dir`.
SimConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
SimConfig load_config(const std::filesystem::path& path);
// Applies a single key=value assignment (shared by files and CLI flags).
void apply_setting(SimConfig& config, const std::string& key, const std::string& value,
                   const std::filesystem::path& base_dir = {});

// customer,arrival,start,idle,deadline,late
void write_report_csv(const Instance& instance, const SimReport& report, std::ostream& out);
void write_summary(const SimReport& report, std::ostream& out);

}  // namespace lmd::sim
