#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "lmd/core/model.hpp"

namespace lmd::perception {

// x forward, y left, z up; meters.
using PointCloud = std::vector<Eigen::Vector3d>;

class FitError : public InputError {
 public:
  using InputError::InputError;
};

// Points p with normal·p == offset. The normal is unit length with z >= 0.
struct Plane {
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  double offset = 0.0;

  double signed_distance(const Eigen::Vector3d& p) const { return normal.dot(p) - offset; }
};

struct RansacOptions {
  int iterations = 200;
  double inlier_threshold = 0.03;  // meters
  std::uint64_t seed = 1;
  // Least-squares refit on the inliers, kept only if it loses no inliers.
  bool refine = true;
};

struct PlaneFit {
  Plane plane;
  std::vector<std::size_t> inliers;  // indices into the cloud, ascending
};

// Throws FitError for fewer than 3 points, non-finite coordinates or a
// collinear cloud.
PlaneFit fit_plane_ransac(const PointCloud& cloud, const RansacOptions& options = {});

enum class Roughness { kSmooth, kModerate, kRough, kUnknown };
const char* to_string(Roughness r);

inline constexpr double kModerateFrom = 0.05;  // meters
inline constexpr double kRoughFrom = 0.20;

// [0, 0.05) smooth, [0.05, 0.20) moderate, >= 0.20 rough.
Roughness classify_roughness(double mean_distance);
// smooth 1.0, moderate 0.75, rough 0.5; unknown terrain is not throttled.
double beta_for(Roughness r);

struct Cell {
  double mean_distance = 0.0;
  Roughness roughness = Roughness::kUnknown;
  std::size_t sample_count = 0;
};

using CellKey = std::pair<int, int>;  // (row, col) = (floor(x), floor(y))

struct GridExtent {
  int row_begin = 0, row_end = 0;  // half-open
  int col_begin = 0, col_end = 0;
};

struct RoughnessGrid {
  std::map<CellKey, Cell> cells;

  const Cell* find(int row, int col) const;
  std::size_t count(Roughness r) const;
};

// 1 m x 1 m cells holding the mean |point-plane distance| of their points.
// With an extent, every cell inside it is present and empty ones are unknown.
RoughnessGrid roughness_grid(const PointCloud& cloud, const Plane& plane,
                             const std::optional<GridExtent>& extent = std::nullopt);

// Region sampled ahead of the wheels: x in [origin_x, origin_x + distance),
// |y - origin_y| < half_width.
struct Lookahead {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double distance = 2.0;
  double half_width = 0.5;
};

struct SpeedDecision {
  double beta = 1.0;
  double score = 0.0;  // mean of the sampled cell means
  Roughness roughness = Roughness::kUnknown;
  int cells_used = 0;
  bool unknown_terrain = true;
};

SpeedDecision speed_factor(const RoughnessGrid& grid, const Lookahead& lookahead = {});

struct ProfileSegment {
  double length = 0.0;                // meters along x
  double roughness = 0.0;             // target mean |z| in meters
  std::optional<double> density;      // points per m², overrides the default
};

struct SynthOptions {
  double width = 2.0;        // y in [-width/2, width/2)
  double start_x = 0.0;
};

// Flat ground at z=0 with |z| ~ U[0, 2r] and a random sign in each segment,
// so the expected mean distance to the plane is r.
PointCloud synth_cloud(const std::vector<ProfileSegment>& profile, double density,
                       std::uint64_t seed, const SynthOptions& options = {});

// Whitespace separated `x y z` lines; '#' starts a comment.
PointCloud read_cloud(std::istream& in);
void write_cloud(const PointCloud& cloud, std::ostream& out);
// row,col,mean,class
void write_grid_csv(const RoughnessGrid& grid, std::ostream& out);

}  // namespace lmd::perception
