#include "wavenav/laser.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "wavenav/error.hpp"

namespace wavenav
{

std::optional<double> cast_ray_walls(const OccupancyGrid & statics, Vec2 origin, double angle,
  double max_range)
{
  const auto & spec = statics.spec();
  const auto start = world_to_cell(spec, origin);
  if (!start) {
    return std::nullopt;
  }
  const double dx = std::cos(angle);
  const double dy = std::sin(angle);
  const double inf = std::numeric_limits<double>::infinity();
  const double res = spec.resolution;

  Cell c = *start;
  const int step_x = dx > 0.0 ? 1 : -1;
  const int step_y = dy > 0.0 ? 1 : -1;
  const double lx = origin.x - spec.origin.x;
  const double ly = origin.y - spec.origin.y;
  const double next_x = (dx > 0.0 ? c.x + 1 : c.x) * res;
  const double next_y = (dy > 0.0 ? c.y + 1 : c.y) * res;
  double t_max_x = dx != 0.0 ? (next_x - lx) / dx : inf;
  double t_max_y = dy != 0.0 ? (next_y - ly) / dy : inf;
  const double t_delta_x = dx != 0.0 ? res / std::abs(dx) : inf;
  const double t_delta_y = dy != 0.0 ? res / std::abs(dy) : inf;

  while (true) {
    double t_enter;
    if (t_max_x < t_max_y) {
      t_enter = t_max_x;
      t_max_x += t_delta_x;
      c.x += step_x;
    } else {
      t_enter = t_max_y;
      t_max_y += t_delta_y;
      c.y += step_y;
    }
    t_enter = std::max(0.0, t_enter);
    if (t_enter > max_range || !spec.contains(c)) {
      return std::nullopt;
    }
    if (statics.is_wall(c)) {
      return t_enter;
    }
  }
}

std::optional<double> cast_ray_disc(const Disc & disc, Vec2 origin, double angle)
{
  const Vec2 u{std::cos(angle), std::sin(angle)};
  const Vec2 m = origin - disc.center;
  const double b = dot(m, u);
  const double c = dot(m, m) - disc.radius * disc.radius;
  if (c <= 0.0) {
    return 0.0;  // origin inside the disc
  }
  if (b > 0.0) {
    return std::nullopt;  // pointing away
  }
  const double disc_sq = b * b - c;
  if (disc_sq < 0.0) {
    return std::nullopt;
  }
  return -b - std::sqrt(disc_sq);
}

LaserScan simulate_scan(const GroundTruthWorld & world, const Pose & pose, int n_beams,
  double max_range, double noise_sd, RandomStream * rng)
{
  if (n_beams < 2) {
    throw std::invalid_argument("a scan needs at least two beams");
  }
  if (!world_to_cell(world.statics.spec(), pose.position())) {
    throw Error(ErrorCode::PoseOutOfBounds, "scan pose lies off the map");
  }
  if (noise_sd > 0.0 && rng == nullptr) {
    throw std::invalid_argument("range noise requires a random stream");
  }

  // Keeps noisy ranges strictly positive.
  constexpr double min_range = 1e-3;
  LaserScan scan;
  scan.max_range = max_range;
  scan.beams.reserve(static_cast<std::size_t>(n_beams));
  const double span = std::numbers::pi;
  for (int i = 0; i < n_beams; ++i) {
    const double bearing = -span / 2.0 + span * i / (n_beams - 1);
    const double angle = pose.theta + bearing;
    double best = std::numeric_limits<double>::infinity();
    if (const auto t = cast_ray_walls(world.statics, pose.position(), angle, max_range)) {
      best = *t;
    }
    for (const auto & d : world.discs) {
      if (const auto t = cast_ray_disc(d, pose.position(), angle)) {
        best = std::min(best, *t);
      }
    }
    Beam beam{bearing, max_range, false};
    if (best <= max_range) {
      double r = best;
      if (noise_sd > 0.0) {
        r += rng->normal(0.0, noise_sd);
      }
      beam.range = std::clamp(r, min_range, max_range);
      beam.hit = true;
    }
    scan.beams.push_back(beam);
  }
  return scan;
}

}  // namespace wavenav
