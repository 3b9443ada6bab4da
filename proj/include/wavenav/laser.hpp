#ifndef WAVENAV_LASER_HPP_
#define WAVENAV_LASER_HPP_

#include <optional>
#include <vector>

#include "wavenav/grid_map.hpp"
#include "wavenav/rng.hpp"
#include "wavenav/scan.hpp"
#include "wavenav/types.hpp"

namespace wavenav
{

struct Disc
{
  Vec2 center;
  double radius{0.0};
};

/// What the sensor actually sees: the true static layout (independent of the
/// map handed to the robot) plus moving discs.
struct GroundTruthWorld
{
  OccupancyGrid statics;
  std::vector<Disc> discs;
};

/// Distance along a ray to the first wall cell, walking every cell the ray
/// crosses. The cell containing the origin is not tested. nullopt when
/// nothing is struck within max_range or the ray leaves the map.
std::optional<double> cast_ray_walls(const OccupancyGrid & statics, Vec2 origin, double angle,
  double max_range);

/// Smallest t >= 0 with |origin + t*dir - center| = radius, if any.
std::optional<double> cast_ray_disc(const Disc & disc, Vec2 origin, double angle);

/// 180 degree scan with `n_beams` bearings evenly spaced over [-pi/2, pi/2].
/// Hit ranges get N(0, noise_sd) noise from `rng`, clamped to (0, max_range].
/// Throws PoseOutOfBounds if the pose is off the map.
LaserScan simulate_scan(const GroundTruthWorld & world, const Pose & pose, int n_beams,
  double max_range, double noise_sd = 0.0, RandomStream * rng = nullptr);

}  // namespace wavenav

#endif  // WAVENAV_LASER_HPP_
