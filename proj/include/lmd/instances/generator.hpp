#pragma once

#include <cstdint>

#include "lmd/core/model.hpp"

namespace lmd::instances {

// Declared distributions of the random generator (seconds and meters; the
// vehicle covers one meter per second):
//   depot at the centre of a `side` x `side` square, customers uniform on it;
//   window centre = d̄(0,i) + U[0, centre_spread];
//   window width  = U[width_min, width_max], start clipped at 0.
// Windows are redrawn until the heuristic finds a solution under d̄+ε; every
// `widen_after` rejections all widths are scaled by `widen_factor`.
struct GeneratorOptions {
  double side = 100.0;
  double epsilon = 0.0;
  double centre_spread = 200.0;
  double width_min = 60.0;
  double width_max = 240.0;
  int widen_after = 10;
  double widen_factor = 1.25;
  int max_attempts = 1000;
};

// Capacity of every vehicle: ceil(2n / vehicles).
int sweep_capacity(int customers, int vehicles);

Instance generate_random(int customers, int vehicles, std::uint64_t seed,
                         const GeneratorOptions& options = {});

}  // namespace lmd::instances
