#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "lmd/safety/safety.hpp"

namespace lmd::safety {

namespace {

constexpr double kPeriod = 0.5;  // seconds between observations

// Samples a piecewise-linear keyframe path every kPeriod over [t0, t1].
std::vector<Stamped> sample(const std::vector<Stamped>& keys, double t0, double t1) {
  const VehiclePath path(keys);
  std::vector<Stamped> out;
  const int steps = static_cast<int>(std::lround((t1 - t0) / kPeriod));
  for (int i = 0; i <= steps; ++i) out.push_back(path.at(t0 + i * kPeriod));
  return out;
}

// Vehicle driving along +x from the origin at `speed`, then holding still.
VehiclePath straight(double speed, double until, double stop_x = INFINITY) {
  const double t_stop = std::min(until, stop_x / speed);
  return VehiclePath({{0.0, 0.0, 0.0}, {t_stop, speed * t_stop, 0.0}, {until + 60.0, speed * t_stop, 0.0}});
}

}  // namespace

Scenario table_scenario(int interaction) {
  Scenario sc;
  switch (interaction) {
    case 1:
      // Pedestrian about 15 m to the left walking further away.
      sc.name = "single pedestrian moving away";
      sc.vehicle = straight(1.0, 20.0);
      sc.pedestrians[1] = sample({{0.0, 2.0, 15.0}, {10.0, 4.0, 27.0}}, 0.0, 10.0);
      break;
    case 2:
      // Walks toward the path, stands on it, and the vehicle keeps closing in.
      sc.name = "pedestrian stops on the path";
      sc.vehicle = straight(1.0, 20.0, 13.6);
      sc.pedestrians[1] = sample({{0.0, 14.0, -4.0}, {4.0, 14.0, 0.0}, {20.0, 14.0, 0.0}}, 0.0, 15.0);
      break;
    case 3:
      // Group standing in the shade on the left; two of three are detected.
      sc.name = "standing group on the left";
      sc.vehicle = straight(1.0, 30.0);
      sc.pedestrians[1] = sample({{0.0, 10.0, 6.0}, {30.0, 10.0, 6.0}}, 0.0, 24.0);
      sc.pedestrians[2] = sample({{0.0, 11.0, 7.0}, {30.0, 11.0, 7.0}}, 0.0, 24.0);
      break;
    case 4:
      // First seen right next to the vehicle, then leaves ahead of it.
      sc.name = "close pedestrian walking off";
      sc.vehicle = VehiclePath({{0.0, 0.0, 0.0}, {2.0, 0.0, 0.0}, {30.0, 33.6, 0.0}});
      sc.pedestrians[1] = sample({{0.0, 0.3, -0.25}, {3.0, 2.1, -0.25}, {12.0, 2.1, -13.75}}, 0.0, 5.5);
      break;
    case 5:
      // Two pedestrians emerge on the right, approach as if crossing, then stop short.
      sc.name = "pair stopping before the path";
      sc.vehicle = straight(0.8, 30.0);
      sc.pedestrians[1] = sample({{0.0, 12.0, -9.0}, {10.8, 12.0, -2.5}, {30.0, 12.0, -2.5}}, 4.0, 16.0);
      sc.pedestrians[2] = sample({{0.0, 13.0, -9.5}, {11.6, 13.0, -2.5}, {30.0, 13.0, -2.5}}, 4.0, 16.0);
      break;
    default:
      throw InputError(fmt::format("interaction must be 1..5, got {}", interaction));
  }
  return sc;
}

std::string table_expected(int interaction) {
  static const char* kExpected[] = {"G-G-G", "G-B-R", "G-G-G", "R-B-G", "G-B-G"};
  if (interaction < 1 || interaction > 5) {
    throw InputError(fmt::format("interaction must be 1..5, got {}", interaction));
  }
  return kExpected[interaction - 1];
}

}  // namespace lmd::safety
