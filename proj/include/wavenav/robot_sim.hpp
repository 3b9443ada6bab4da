#ifndef WAVENAV_ROBOT_SIM_HPP_
#define WAVENAV_ROBOT_SIM_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "wavenav/grid_map.hpp"
#include "wavenav/laser.hpp"
#include "wavenav/rng.hpp"
#include "wavenav/types.hpp"

namespace wavenav
{

struct VelocityCommand
{
  double v{0.0};      // m/s
  double omega{0.0};  // rad/s
};

/// Unicycle update, exact on arcs: straight line for omega == 0, otherwise a
/// circular arc of radius v/omega turning by omega*dt.
Pose integrate(const Pose & pose, const VelocityCommand & cmd, double dt);

struct FollowConfig
{
  double k_omega{1.5};    // 1/s
  double v_max{0.3};      // m/s
  double omega_max{1.0};  // rad/s
};

/// Arc-turn pursuit of a waypoint.
///
///   omega = clamp(k_omega * err, +-omega_max)
///   v     = v_max * max(0, cos err)
///
/// so a larger heading error gives a tighter arc, and the robot turns on the
/// spot once the waypoint is 90 degrees or more off its heading.
VelocityCommand follow_step(const Pose & pose, Vec2 waypoint, const FollowConfig & cfg);

/// A scripted walker that wanders at fixed speed and steers clear of walls
/// and of other discs.
struct DynamicEntity
{
  DynamicEntity(Pose start, double radius, double speed, std::uint64_t seed,
    std::uint64_t stream_id);

  Pose pose;
  double radius;
  double speed;
  double leg_remaining{0.0};  // s until the next random heading
  RandomStream rng;

  Disc disc() const { return {pose.position(), radius}; }
};

struct EntityConfig
{
  double min_leg{2.0};         // s
  double max_leg{6.0};         // s
  double probe_time{1.0};      // s of travel looked ahead along the heading
  double personal_space{0.3};  // m kept free between an entity and any other disc
  int heading_attempts{16};
};

/// Advances every entity by dt in order. `others` are extra discs (the robot)
/// that entities keep clear of, alongside each other. An entity only moves
/// to positions where its disc overlaps no wall and no map edge.
void step_entities(const OccupancyGrid & statics, std::vector<DynamicEntity> & entities,
  double dt, std::span<const Disc> others, const EntityConfig & cfg = {});

}  // namespace wavenav

#endif  // WAVENAV_ROBOT_SIM_HPP_
