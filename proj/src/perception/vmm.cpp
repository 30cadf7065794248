#include "lmd/perception/vmm.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Geometry>
#include <Eigen/SVD>
#include <fmt/format.h>

namespace lmd::perception {

namespace {

constexpr double kCollinearTol = 1e-9;

std::optional<Plane> plane_through(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                                   const Eigen::Vector3d& c) {
  Eigen::Vector3d n = (b - a).cross(c - a);
  const double scale = std::max({(b - a).norm(), (c - a).norm(), 1.0});
  if (n.norm() <= kCollinearTol * scale * scale) return std::nullopt;
  n.normalize();
  if (n.z() < 0.0) n = -n;
  return Plane{n, n.dot(a)};
}

std::vector<std::size_t> inliers_of(const PointCloud& cloud, const Plane& plane,
                                    double threshold) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (std::abs(plane.signed_distance(cloud[i])) <= threshold) out.push_back(i);
  }
  return out;
}

// Total least squares plane through the selected points.
std::optional<Plane> least_squares(const PointCloud& cloud, const std::vector<std::size_t>& idx) {
  if (idx.size() < 3) return std::nullopt;
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (auto i : idx) centroid += cloud[i];
  centroid /= static_cast<double>(idx.size());
  Eigen::MatrixXd centred(idx.size(), 3);
  for (std::size_t r = 0; r < idx.size(); ++r) centred.row(r) = (cloud[idx[r]] - centroid).transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centred, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(1) <= kCollinearTol * std::max(1.0, sv(0))) return std::nullopt;
  Eigen::Vector3d n = svd.matrixV().col(2).normalized();
  if (n.z() < 0.0) n = -n;
  return Plane{n, n.dot(centroid)};
}

// A non-collinear triple found without randomness, or nullopt if none exists.
std::optional<Plane> deterministic_hypothesis(const PointCloud& cloud) {
  const Eigen::Vector3d& a = cloud[0];
  std::size_t far = 0;
  for (std::size_t i = 1; i < cloud.size(); ++i) {
    if ((cloud[i] - a).norm() > (cloud[far] - a).norm()) far = i;
  }
  const Eigen::Vector3d dir = cloud[far] - a;
  if (dir.norm() == 0.0) return std::nullopt;
  std::size_t best = 0;
  double best_dist = -1.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double d = dir.cross(cloud[i] - a).norm();
    if (d > best_dist) {
      best_dist = d;
      best = i;
    }
  }
  return plane_through(a, cloud[far], cloud[best]);
}

}  // namespace

PlaneFit fit_plane_ransac(const PointCloud& cloud, const RansacOptions& options) {
  if (cloud.size() < 3) {
    throw FitError(fmt::format("plane fit needs at least 3 points, got {}", cloud.size()));
  }
  for (const auto& p : cloud) {
    if (!p.allFinite()) throw FitError("cloud contains non-finite coordinates");
  }
  if (options.iterations < 1 || !(options.inlier_threshold > 0.0)) {
    throw InputError("RANSAC needs iterations >= 1 and a positive inlier threshold");
  }
  auto seeded = deterministic_hypothesis(cloud);
  if (!seeded) throw FitError("degenerate cloud: all points are collinear");

  PlaneFit best{*seeded, inliers_of(cloud, *seeded, options.inlier_threshold)};
  std::seed_seq seq{static_cast<std::uint32_t>(options.seed),
                    static_cast<std::uint32_t>(options.seed >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_int_distribution<std::size_t> pick(0, cloud.size() - 1);
  for (int it = 0; it < options.iterations; ++it) {
    const std::size_t a = pick(rng), b = pick(rng), c = pick(rng);
    if (a == b || b == c || a == c) continue;
    const auto plane = plane_through(cloud[a], cloud[b], cloud[c]);
    if (!plane) continue;
    auto in = inliers_of(cloud, *plane, options.inlier_threshold);
    if (in.size() > best.inliers.size()) best = {*plane, std::move(in)};
  }
  if (options.refine) {
    if (const auto refit = least_squares(cloud, best.inliers)) {
      auto in = inliers_of(cloud, *refit, options.inlier_threshold);
      if (in.size() >= best.inliers.size()) best = {*refit, std::move(in)};
    }
  }
  return best;
}

const char* to_string(Roughness r) {
  switch (r) {
    case Roughness::kSmooth: return "smooth";
    case Roughness::kModerate: return "moderate";
    case Roughness::kRough: return "rough";
    case Roughness::kUnknown: return "unknown";
  }
  return "unknown";
}

Roughness classify_roughness(double mean_distance) {
  if (!std::isfinite(mean_distance) || mean_distance < 0.0) {
    throw InputError(fmt::format("roughness score must be finite and >= 0, got {}", mean_distance));
  }
  if (mean_distance < kModerateFrom) return Roughness::kSmooth;
  if (mean_distance < kRoughFrom) return Roughness::kModerate;
  return Roughness::kRough;
}

double beta_for(Roughness r) {
  switch (r) {
    case Roughness::kRough: return 0.5;
    case Roughness::kModerate: return 0.75;
    default: return 1.0;
  }
}

const Cell* RoughnessGrid::find(int row, int col) const {
  const auto it = cells.find({row, col});
  return it == cells.end() ? nullptr : &it->second;
}

std::size_t RoughnessGrid::count(Roughness r) const {
  return static_cast<std::size_t>(std::count_if(
      cells.begin(), cells.end(), [r](const auto& kv) { return kv.second.roughness == r; }));
}

RoughnessGrid roughness_grid(const PointCloud& cloud, const Plane& plane,
                             const std::optional<GridExtent>& extent) {
  std::map<CellKey, std::pair<double, std::size_t>> sums;
  for (const auto& p : cloud) {
    const CellKey key{static_cast<int>(std::floor(p.x())), static_cast<int>(std::floor(p.y()))};
    if (extent && (key.first < extent->row_begin || key.first >= extent->row_end ||
                   key.second < extent->col_begin || key.second >= extent->col_end)) {
      continue;
    }
    auto& [sum, n] = sums[key];
    sum += std::abs(plane.signed_distance(p));
    ++n;
  }
  RoughnessGrid grid;
  if (extent) {
    for (int r = extent->row_begin; r < extent->row_end; ++r) {
      for (int c = extent->col_begin; c < extent->col_end; ++c) grid.cells[{r, c}] = Cell{};
    }
  }
  for (const auto& [key, acc] : sums) {
    const double mean = acc.first / static_cast<double>(acc.second);
    grid.cells[key] = Cell{mean, classify_roughness(mean), acc.second};
  }
  return grid;
}

SpeedDecision speed_factor(const RoughnessGrid& grid, const Lookahead& look) {
  SpeedDecision out;
  const int row_begin = static_cast<int>(std::floor(look.origin_x));
  const int row_end = static_cast<int>(std::ceil(look.origin_x + look.distance));
  const int col_begin = static_cast<int>(std::floor(look.origin_y - look.half_width));
  const int col_end = static_cast<int>(std::ceil(look.origin_y + look.half_width));
  double sum = 0.0;
  for (int r = row_begin; r < row_end; ++r) {
    for (int c = col_begin; c < col_end; ++c) {
      const Cell* cell = grid.find(r, c);
      if (cell == nullptr || cell->sample_count == 0) continue;
      sum += cell->mean_distance;
      ++out.cells_used;
    }
  }
  if (out.cells_used == 0) return out;
  out.unknown_terrain = false;
  out.score = sum / out.cells_used;
  out.roughness = classify_roughness(out.score);
  out.beta = beta_for(out.roughness);
  return out;
}

PointCloud synth_cloud(const std::vector<ProfileSegment>& profile, double density,
                       std::uint64_t seed, const SynthOptions& options) {
  if (!(density >= 0.0)) throw InputError(fmt::format("negative density {}", density));
  if (!(options.width > 0.0)) throw InputError("cloud width must be positive");
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PointCloud cloud;
  double x0 = options.start_x;
  for (const auto& seg : profile) {
    const double dens = seg.density.value_or(density);
    if (!(dens >= 0.0)) throw InputError(fmt::format("negative density {}", dens));
    if (!(seg.length >= 0.0) || !(seg.roughness >= 0.0)) {
      throw InputError("segment length and roughness must be non-negative");
    }
    const auto count = static_cast<std::size_t>(std::llround(dens * seg.length * options.width));
    for (std::size_t i = 0; i < count; ++i) {
      const double x = x0 + seg.length * unit(rng);
      const double y = options.width * (unit(rng) - 0.5);
      double z = 2.0 * seg.roughness * unit(rng);
      if (unit(rng) < 0.5) z = -z;
      cloud.emplace_back(x, y, z);
    }
    x0 += seg.length;
  }
  return cloud;
}

PointCloud read_cloud(std::istream& in) {
  PointCloud cloud;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    double x, y, z;
    if (!(ss >> x)) continue;
    std::string extra;
    if (!(ss >> y >> z) || (ss >> extra)) {
      throw InputError(fmt::format("line {}: expected `x y z`", line_no));
    }
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
      throw InputError(fmt::format("line {}: non-finite coordinate", line_no));
    }
    cloud.emplace_back(x, y, z);
  }
  return cloud;
}

void write_cloud(const PointCloud& cloud, std::ostream& out) {
  for (const auto& p : cloud) out << fmt::format("{} {} {}\n", p.x(), p.y(), p.z());
}

void write_grid_csv(const RoughnessGrid& grid, std::ostream& out) {
  out << "row,col,mean,class\n";
  for (const auto& [key, cell] : grid.cells) {
    out << fmt::format("{},{},{},{}\n", key.first, key.second, cell.mean_distance,
                       to_string(cell.roughness));
  }
}

}  // namespace lmd::perception
