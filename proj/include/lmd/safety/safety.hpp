#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lmd/core/model.hpp"

namespace lmd::safety {

struct Stamped {
  double t = 0.0;  // seconds
  double x = 0.0;  // meters
  double y = 0.0;
};

enum class Label { kGreen, kBlue, kRed };
char to_char(Label l);          // G, B, R
const char* to_string(Label l); // green, blue, red

inline constexpr int kObservedPoints = 8;
inline constexpr int kPredictedPoints = 12;

struct Prediction {
  std::vector<Stamped> points;  // kPredictedPoints future positions
  bool low_confidence = false;  // fewer than kObservedPoints observations
  double speed = 0.0;           // m/s of the extrapolated motion
};

// Anything mapping the last 8 observations to 12 future positions.
class Predictor {
 public:
  virtual ~Predictor() = default;
  // nullopt when the observations cannot support a prediction.
  virtual std::optional<Prediction> predict(std::span<const Stamped> observations) const = 0;
};

// Straight-line extrapolation of the mean velocity over the last 8
// observations, at their mean sampling period.
class ConstantVelocityPredictor : public Predictor {
 public:
  std::optional<Prediction> predict(std::span<const Stamped> observations) const override;
};

struct PedestrianTrack {
  int id = 0;
  std::vector<Stamped> observations;  // ascending time
  std::optional<Prediction> prediction;
  std::vector<std::pair<double, Label>> label_history;

  std::span<const Stamped> recent() const;  // at most the last 8
};

// Planned vehicle positions; timestamps must not decrease.
class VehiclePath {
 public:
  VehiclePath() = default;
  explicit VehiclePath(std::vector<Stamped> points);

  // Linear interpolation, held constant outside the covered interval.
  Stamped at(double t) const;
  bool empty() const { return points_.empty(); }
  const std::vector<Stamped>& points() const { return points_; }

 private:
  std::vector<Stamped> points_;
};

struct ClassifierParams {
  double proximity = 0.5;          // red below this distance
  double collision_radius = 1.0;   // blue test around the matching path point
  double standing_speed = 0.15;    // below this a pedestrian counts as standing
  double standing_radius = 1.5;    // widened blue test for standing pedestrians
  double interaction_radius = 20.0;
};

double distance(const Stamped& a, const Stamped& b);

// Red if the current distance is below the proximity threshold; else blue if
// a predicted position comes within the collision radius of the vehicle's
// planned position at the same time; else green. Without a prediction only
// the distance test applies.
Label classify(const Stamped& current, const std::optional<Prediction>& prediction,
               const VehiclePath& path, const ClassifierParams& params = {});
Label classify(const PedestrianTrack& track, const VehiclePath& path,
               const ClassifierParams& params = {});

struct VocalizerEvent {
  double t = 0.0;
  int track_id = 0;
  Label label = Label::kGreen;
};

// One event for every entry into blue or red. The stream starts from no label.
std::vector<VocalizerEvent> vocalizer_events(int track_id,
                                             std::span<const std::pair<double, Label>> labels);

struct Scenario {
  std::string name;
  VehiclePath vehicle;
  std::map<int, std::vector<Stamped>> pedestrians;  // id -> observations
};

// Lines `V t x y` (vehicle plan) and `P id t x y` (pedestrian observation);
// '#' starts a comment.
Scenario parse_scenario(std::istream& in);
void write_scenario(const Scenario& scenario, std::ostream& out);

struct TrackResult {
  int id = 0;
  std::vector<std::pair<double, Label>> labels;  // one per step inside the interaction
  std::vector<Label> phases;                     // first, middle, last step
  std::vector<VocalizerEvent> events;

  std::string phase_string() const;  // e.g. "G-B-R"
};

struct ScenarioResult {
  std::vector<TrackResult> tracks;
};

// Replays each pedestrian observation by observation. A step counts toward
// the interaction while the pedestrian is within the interaction radius.
ScenarioResult run_scenario(const Scenario& scenario, const ClassifierParams& params = {},
                            const Predictor& predictor = ConstantVelocityPredictor{});

// time,track_id,class,event
void write_events_csv(const ScenarioResult& result, std::ostream& out);

// The five recorded field interactions, rebuilt as scripted geometry.
Scenario table_scenario(int interaction);  // 1..5
std::string table_expected(int interaction);

}  // namespace lmd::safety
