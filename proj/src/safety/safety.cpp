#include "lmd/safety/safety.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

namespace lmd::safety {

char to_char(Label l) {
  switch (l) {
    case Label::kGreen: return 'G';
    case Label::kBlue: return 'B';
    case Label::kRed: return 'R';
  }
  return '?';
}

const char* to_string(Label l) {
  switch (l) {
    case Label::kGreen: return "green";
    case Label::kBlue: return "blue";
    case Label::kRed: return "red";
  }
  return "?";
}

std::optional<Prediction> ConstantVelocityPredictor::predict(
    std::span<const Stamped> observations) const {
  if (observations.size() < 2) return std::nullopt;
  if (observations.size() > kObservedPoints) {
    observations = observations.last(kObservedPoints);
  }
  const Stamped& first = observations.front();
  const Stamped& last = observations.back();
  const double span_t = last.t - first.t;
  if (!(span_t > 0.0)) return std::nullopt;
  const double period = span_t / static_cast<double>(observations.size() - 1);
  const double vx = (last.x - first.x) / span_t;
  const double vy = (last.y - first.y) / span_t;
  Prediction p;
  p.low_confidence = observations.size() < kObservedPoints;
  p.speed = std::hypot(vx, vy);
  for (int k = 1; k <= kPredictedPoints; ++k) {
    const double dt = period * k;
    p.points.push_back({last.t + dt, last.x + vx * dt, last.y + vy * dt});
  }
  return p;
}

std::span<const Stamped> PedestrianTrack::recent() const {
  std::span<const Stamped> all(observations);
  return all.size() > kObservedPoints ? all.last(kObservedPoints) : all;
}

VehiclePath::VehiclePath(std::vector<Stamped> points) : points_(std::move(points)) {
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (points_[i].t < points_[i - 1].t) {
      throw InputError(fmt::format("vehicle path timestamps decrease at point {}", i));
    }
  }
}

Stamped VehiclePath::at(double t) const {
  if (points_.empty()) throw InputError("empty vehicle path");
  if (t <= points_.front().t) return {t, points_.front().x, points_.front().y};
  if (t >= points_.back().t) return {t, points_.back().x, points_.back().y};
  const auto it = std::upper_bound(points_.begin(), points_.end(), t,
                                   [](double v, const Stamped& p) { return v < p.t; });
  const Stamped& b = *it;
  const Stamped& a = *(it - 1);
  const double w = b.t > a.t ? (t - a.t) / (b.t - a.t) : 1.0;
  return {t, a.x + w * (b.x - a.x), a.y + w * (b.y - a.y)};
}

double distance(const Stamped& a, const Stamped& b) { return std::hypot(a.x - b.x, a.y - b.y); }

Label classify(const Stamped& current, const std::optional<Prediction>& prediction,
               const VehiclePath& path, const ClassifierParams& params) {
  if (distance(current, path.at(current.t)) < params.proximity) return Label::kRed;
  if (!prediction) return Label::kGreen;
  const double radius = prediction->speed < params.standing_speed
                            ? std::max(params.standing_radius, params.collision_radius)
                            : params.collision_radius;
  for (const Stamped& p : prediction->points) {
    if (distance(p, path.at(p.t)) < radius) return Label::kBlue;
  }
  return Label::kGreen;
}

Label classify(const PedestrianTrack& track, const VehiclePath& path,
               const ClassifierParams& params) {
  if (track.observations.empty()) throw InputError("track has no observations");
  return classify(track.observations.back(), track.prediction, path, params);
}

std::vector<VocalizerEvent> vocalizer_events(int track_id,
                                             std::span<const std::pair<double, Label>> labels) {
  std::vector<VocalizerEvent> out;
  std::optional<Label> prev;
  for (const auto& [t, label] : labels) {
    if (label != Label::kGreen && prev != label) out.push_back({t, track_id, label});
    prev = label;
  }
  return out;
}

Scenario parse_scenario(std::istream& in) {
  Scenario sc;
  std::vector<Stamped> vehicle;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string kind;
    if (!(ss >> kind)) continue;
    std::string extra;
    if (kind == "V") {
      Stamped s;
      if (!(ss >> s.t >> s.x >> s.y) || (ss >> extra)) {
        throw InputError(fmt::format("line {}: expected `V t x y`", line_no));
      }
      vehicle.push_back(s);
    } else if (kind == "P") {
      int id = 0;
      Stamped s;
      if (!(ss >> id >> s.t >> s.x >> s.y) || (ss >> extra)) {
        throw InputError(fmt::format("line {}: expected `P id t x y`", line_no));
      }
      auto& obs = sc.pedestrians[id];
      if (!obs.empty() && s.t <= obs.back().t) {
        throw InputError(fmt::format("line {}: pedestrian {} times must increase", line_no, id));
      }
      obs.push_back(s);
    } else {
      throw InputError(fmt::format("line {}: unknown record `{}`", line_no, kind));
    }
  }
  if (vehicle.empty()) throw InputError("scenario has no vehicle path");
  sc.vehicle = VehiclePath(std::move(vehicle));
  return sc;
}

void write_scenario(const Scenario& scenario, std::ostream& out) {
  if (!scenario.name.empty()) out << "# " << scenario.name << '\n';
  for (const auto& p : scenario.vehicle.points()) out << fmt::format("V {} {} {}\n", p.t, p.x, p.y);
  for (const auto& [id, obs] : scenario.pedestrians) {
    for (const auto& p : obs) out << fmt::format("P {} {} {} {}\n", id, p.t, p.x, p.y);
  }
}

std::string TrackResult::phase_string() const {
  std::string s;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    if (i) s += '-';
    s += to_char(phases[i]);
  }
  return s;
}

ScenarioResult run_scenario(const Scenario& scenario, const ClassifierParams& params,
                            const Predictor& predictor) {
  ScenarioResult result;
  for (const auto& [id, observations] : scenario.pedestrians) {
    PedestrianTrack track;
    track.id = id;
    TrackResult tr;
    tr.id = id;
    for (const Stamped& obs : observations) {
      track.observations.push_back(obs);
      if (distance(obs, scenario.vehicle.at(obs.t)) > params.interaction_radius) continue;
      track.prediction = predictor.predict(track.recent());
      const Label label = classify(track, scenario.vehicle, params);
      track.label_history.emplace_back(obs.t, label);
    }
    tr.labels = track.label_history;
    if (!tr.labels.empty()) {
      const std::size_t n = tr.labels.size();
      tr.phases = {tr.labels.front().second, tr.labels[(n - 1) / 2].second,
                   tr.labels.back().second};
    }
    tr.events = vocalizer_events(id, tr.labels);
    result.tracks.push_back(std::move(tr));
  }
  return result;
}

void write_events_csv(const ScenarioResult& result, std::ostream& out) {
  out << "time,track_id,class,event\n";
  for (const auto& tr : result.tracks) {
    std::size_t next_event = 0;
    for (const auto& [t, label] : tr.labels) {
      const bool fired = next_event < tr.events.size() && tr.events[next_event].t == t;
      if (fired) ++next_event;
      out << fmt::format("{},{},{},{}\n", t, tr.id, to_string(label), fired ? "warn" : "");
    }
  }
}

}  // namespace lmd::safety
