#include "wavenav/robot_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wavenav
{

Pose integrate(const Pose & pose, const VelocityCommand & cmd, double dt)
{
  if (!(dt > 0.0)) {
    throw std::invalid_argument("integration step must be positive");
  }
  Pose out = pose;
  if (cmd.omega == 0.0) {
    out.x += cmd.v * dt * std::cos(pose.theta);
    out.y += cmd.v * dt * std::sin(pose.theta);
  } else {
    const double radius = cmd.v / cmd.omega;
    const double theta_end = pose.theta + cmd.omega * dt;
    out.x += radius * (std::sin(theta_end) - std::sin(pose.theta));
    out.y -= radius * (std::cos(theta_end) - std::cos(pose.theta));
    out.theta = theta_end;
  }
  out.theta = normalize_angle(out.theta);
  return out;
}

VelocityCommand follow_step(const Pose & pose, Vec2 waypoint, const FollowConfig & cfg)
{
  const Vec2 to = waypoint - pose.position();
  const double err = normalize_angle(std::atan2(to.y, to.x) - pose.theta);
  VelocityCommand cmd;
  cmd.omega = std::clamp(cfg.k_omega * err, -cfg.omega_max, cfg.omega_max);
  cmd.v = std::abs(err) >= std::numbers::pi / 2.0 ? 0.0 : cfg.v_max * std::cos(err);
  return cmd;
}

DynamicEntity::DynamicEntity(Pose start, double radius_m, double speed_mps, std::uint64_t seed,
  std::uint64_t stream_id)
: pose(start), radius(radius_m), speed(speed_mps), rng(seed, stream_id)
{
  if (!(radius > 0.0)) {
    throw std::invalid_argument("entity radius must be positive");
  }
}

namespace
{

bool heading_clear(const OccupancyGrid & statics, const DynamicEntity & self, double heading,
  double dt, std::span<const Disc> discs, const EntityConfig & cfg)
{
  const double probe = self.radius + self.speed * cfg.probe_time;
  if (cast_ray_walls(statics, self.pose.position(), heading, probe)) {
    return false;
  }
  const Vec2 next = self.pose.position() + (self.speed * dt) * Vec2{std::cos(heading),
    std::sin(heading)};
  const double search = self.radius + statics.spec().resolution;
  if (wall_clearance(statics, next, search, true) < self.radius) {
    return false;
  }
  for (const auto & d : discs) {
    const double need = self.radius + d.radius + cfg.personal_space;
    const double now = distance(self.pose.position(), d.center);
    const double after = distance(next, d.center);
    if (after < need && after < now) {
      return false;
    }
  }
  return true;
}

}  // namespace

void step_entities(const OccupancyGrid & statics, std::vector<DynamicEntity> & entities,
  double dt, std::span<const Disc> others, const EntityConfig & cfg)
{
  if (!(dt > 0.0)) {
    throw std::invalid_argument("entity step must be positive");
  }
  std::vector<Disc> discs;
  for (std::size_t i = 0; i < entities.size(); ++i) {
    auto & e = entities[i];
    discs.assign(others.begin(), others.end());
    for (std::size_t j = 0; j < entities.size(); ++j) {
      if (j != i) {
        discs.push_back(entities[j].disc());
      }
    }

    e.leg_remaining -= dt;
    if (e.leg_remaining <= 0.0) {
      e.pose.theta = normalize_angle(e.rng.uniform(-std::numbers::pi, std::numbers::pi));
      e.leg_remaining = e.rng.uniform(cfg.min_leg, cfg.max_leg);
    }

    bool clear = heading_clear(statics, e, e.pose.theta, dt, discs, cfg);
    for (int attempt = 0; !clear && attempt < cfg.heading_attempts; ++attempt) {
      e.pose.theta = normalize_angle(e.rng.uniform(-std::numbers::pi, std::numbers::pi));
      e.leg_remaining = e.rng.uniform(cfg.min_leg, cfg.max_leg);
      clear = heading_clear(statics, e, e.pose.theta, dt, discs, cfg);
    }
    if (clear) {
      e.pose = integrate(e.pose, {e.speed, 0.0}, dt);
    }
  }
}

}  // namespace wavenav
