#include "wavenav/nav_controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wavenav/error.hpp"

namespace wavenav
{

NavConfig NavConfig::real_world()
{
  NavConfig cfg;
  cfg.occupancy_threshold = 10.0;
  cfg.aging_factor = 0.1;
  cfg.v_max = 0.2;
  return cfg;
}

void NavConfig::validate() const
{
  auto positive = [](double v, const char * name) {
    if (!(v > 0.0)) {
      throw Error(ErrorCode::SchemaError, std::string(name) + " must be positive");
    }
  };
  auto non_negative = [](double v, const char * name) {
    if (!(v >= 0.0)) {
      throw Error(ErrorCode::SchemaError, std::string(name) + " must be >= 0");
    }
  };
  positive(resolution, "resolution");
  positive(robot_radius, "robot_radius");
  non_negative(safety_distance, "safety_distance");
  if (inflation_radius) {
    non_negative(*inflation_radius, "inflation_radius");
  }
  positive(avoidance_range, "avoidance_range");
  if (!(occupancy_threshold >= 1.0)) {
    throw Error(ErrorCode::SchemaError, "occupancy_threshold must be >= 1");
  }
  non_negative(aging_factor, "aging_factor");
  positive(v_max, "v_max");
  positive(omega_max, "omega_max");
  positive(epsilon_settle, "epsilon_settle");
  non_negative(min_step_length, "min_step_length");
  if (goal_tolerance) {
    positive(*goal_tolerance, "goal_tolerance");
  }
  if (timeout) {
    positive(*timeout, "timeout");
  }
  positive(k_omega, "k_omega");
  positive(dt, "dt");
  positive(map_range, "map_range");
  positive(guard_time, "guard_time");
  if (laser_beams < 2) {
    throw Error(ErrorCode::SchemaError, "laser_beams must be >= 2");
  }
  positive(laser_max_range, "laser_max_range");
  non_negative(laser_noise_sd, "laser_noise_sd");
  non_negative(odometry_noise_sd, "odometry_noise_sd");
}

const char * to_string(StateKind s)
{
  switch (s) {
    case StateKind::Initialise: return "Initialise";
    case StateKind::PrepareMap: return "PrepareMap";
    case StateKind::PlanPath: return "PlanPath";
    case StateKind::FollowPath: return "FollowPath";
    case StateKind::AvoidObstacles: return "AvoidObstacles";
    case StateKind::Stop: return "Stop";
  }
  return "?";
}

const char * to_string(StopReason r)
{
  switch (r) {
    case StopReason::ReachedGoal: return "ReachedGoal";
    case StopReason::NoPath: return "NoPath";
    case StopReason::StartOrGoalOccupied: return "StartOrGoalOccupied";
    case StopReason::Timeout: return "Timeout";
    case StopReason::OffMap: return "OffMap";
  }
  return "?";
}

const char * to_string(ReplanCause c)
{
  return c == ReplanCause::AvoidanceSettled ? "AvoidanceSettled" : "WaypointsExhausted";
}

const char * to_string(NavEvent::Kind k)
{
  switch (k) {
    case NavEvent::Kind::StateChanged: return "StateChanged";
    case NavEvent::Kind::PathPlanned: return "PathPlanned";
    case NavEvent::Kind::Replanned: return "Replanned";
    case NavEvent::Kind::ObstacleEngaged: return "ObstacleEngaged";
    case NavEvent::Kind::GoalReached: return "GoalReached";
    case NavEvent::Kind::Stopped: return "Stopped";
  }
  return "?";
}

bool is_legal_transition(StateKind from, StateKind to)
{
  using enum StateKind;
  if (from == Stop) {
    return false;
  }
  if (to == Stop) {
    return from != Initialise;
  }
  switch (from) {
    case Initialise: return to == PrepareMap;
    case PrepareMap: return to == PlanPath;
    case PlanPath: return to == FollowPath;
    case FollowPath: return to == AvoidObstacles || to == PrepareMap;
    case AvoidObstacles: return to == PrepareMap;
    case Stop: return false;
  }
  return false;
}

NavController::NavController(OccupancyGrid map, const Pose & start, Vec2 goal, NavConfig cfg)
: cfg_(std::move(cfg)),
  avoider_(cfg_.avoidance()),
  grid_(std::move(map)),
  goal_(goal),
  timeout_(cfg_.effective_timeout(start.position(), goal))
{
  if (!world_to_cell(grid_.spec(), start.position())) {
    throw Error(ErrorCode::StartOutOfBounds, "start pose lies off the map");
  }
  if (!world_to_cell(grid_.spec(), goal)) {
    throw Error(ErrorCode::GoalOutOfBounds, "goal lies off the map");
  }
  transition(StateKind::PrepareMap);
}

void NavController::transition(StateKind to)
{
  NavEvent e;
  e.time = elapsed_;
  e.kind = NavEvent::Kind::StateChanged;
  e.from = state_;
  e.to = to;
  events_.push_back(e);
  state_ = to;
}

void NavController::stop(StopReason reason)
{
  if (reason == StopReason::ReachedGoal) {
    NavEvent g;
    g.time = elapsed_;
    g.kind = NavEvent::Kind::GoalReached;
    events_.push_back(g);
  }
  transition(StateKind::Stop);
  stop_reason_ = reason;
  NavEvent e;
  e.time = elapsed_;
  e.kind = NavEvent::Kind::Stopped;
  e.reason = reason;
  events_.push_back(e);
}

void NavController::abort(StopReason reason)
{
  if (!stopped()) {
    stop(reason);
  }
}

Vec2 NavController::current_target() const
{
  if (target_index_ < targets_.size()) {
    return targets_[target_index_];
  }
  return goal_;
}

void NavController::plan_path(const Pose & pose)
{
  const auto & spec = grid_.spec();
  const Cell start = *world_to_cell(spec, pose.position());
  const Cell goal = *world_to_cell(spec, goal_);

  if (cspace_->is_blocked(goal) || grid_.is_occupied(start)) {
    stop(StopReason::StartOrGoalOccupied);
    return;
  }

  // The robot can sit inside the inflation margin (after an avoidance manoeuvre
  // or once new objects are mapped nearby). Its own cell is known free, so
  // clear the inflation-only cells around it to let the plan lead out.
  const CSpaceGrid * planning = &*cspace_;
  CSpaceGrid carved;
  if (cspace_->is_blocked(start)) {
    carved = *cspace_;
    const double r_cells = cfg_.effective_inflation() / spec.resolution;
    const int reach = static_cast<int>(std::ceil(r_cells));
    for (int dy = -reach; dy <= reach; ++dy) {
      for (int dx = -reach; dx <= reach; ++dx) {
        const Cell c{start.x + dx, start.y + dy};
        if (spec.contains(c) && dx * dx + dy * dy <= r_cells * r_cells && !grid_.is_occupied(c)) {
          carved.blocked[spec.index(c)] = 0;
        }
      }
    }
    planning = &carved;
  }

  try {
    plan_ = make_plan(*planning, start, goal, cfg_.metric, cfg_.min_step_length);
  } catch (const Error & e) {
    if (e.code() == ErrorCode::NoPath) {
      stop(StopReason::NoPath);
      return;
    }
    throw;
  }

  ++plan_count_;
  if (plan_count_ > 1) {
    ++replan_count_;
    NavEvent r;
    r.time = elapsed_;
    r.kind = NavEvent::Kind::Replanned;
    r.cause = pending_cause_;
    events_.push_back(r);
  }
  NavEvent p;
  p.time = elapsed_;
  p.kind = NavEvent::Kind::PathPlanned;
  p.step_count = static_cast<int>(plan_->steps.size());
  p.path_length = plan_->length();
  events_.push_back(p);

  targets_.clear();
  for (const auto & w : plan_->waypoints) {
    targets_.push_back(cell_to_world(spec, w));
  }
  if (targets_.empty()) {
    targets_.push_back(goal_);
  } else {
    targets_.back() = goal_;
  }
  target_index_ = 0;
  transition(StateKind::FollowPath);
}

void NavController::advance_targets(Vec2 position)
{
  const double tol = cfg_.effective_goal_tolerance();
  while (target_index_ < targets_.size() && distance(position, targets_[target_index_]) <= tol) {
    ++target_index_;
  }
}

VelocityCommand NavController::tick(const Pose & odometry, const LaserScan & scan, double dt)
{
  if (stopped()) {
    throw Error(ErrorCode::TickAfterStop, "controller already stopped");
  }
  elapsed_ += dt;
  if (elapsed_ > timeout_) {
    stop(StopReason::Timeout);
    return {};
  }
  if (!world_to_cell(grid_.spec(), odometry.position())) {
    stop(StopReason::OffMap);
    return {};
  }

  mark_detections(grid_, odometry, scan, cfg_.map_range);
  age_objects(grid_, cfg_.aging_factor);
  clear_footprint(grid_, odometry.position(), cfg_.robot_radius);

  advance_targets(odometry.position());
  last_avoidance_ = avoider_.infer(scan, odometry, current_target());
  const bool settled = steering_settled(last_avoidance_, cfg_.epsilon_settle);

  const VelocityCommand cmd = run_states(odometry, settled);
  return stopped() ? VelocityCommand{} : guard(cmd, scan);
}

VelocityCommand NavController::run_states(const Pose & odometry, bool settled)
{
  const double tol = cfg_.effective_goal_tolerance();
  // PrepareMap -> PlanPath -> FollowPath can all run in one cycle; the bound
  // only guards against a plan whose targets are already exhausted.
  for (int hop = 0; hop < 8; ++hop) {
    switch (state_) {
      case StateKind::Initialise:
        transition(StateKind::PrepareMap);
        break;

      case StateKind::PrepareMap:
        cspace_ = inflate(grid_, cfg_.effective_inflation());
        transition(StateKind::PlanPath);
        break;

      case StateKind::PlanPath:
        plan_path(odometry);
        if (stopped()) {
          return {};
        }
        advance_targets(odometry.position());
        break;

      case StateKind::FollowPath:
        if (distance(odometry.position(), goal_) <= tol) {
          stop(StopReason::ReachedGoal);
          return {};
        }
        if (target_index_ >= targets_.size()) {
          pending_cause_ = ReplanCause::WaypointsExhausted;
          transition(StateKind::PrepareMap);
          break;
        }
        if (!settled) {
          NavEvent e;
          e.time = elapsed_;
          e.kind = NavEvent::Kind::ObstacleEngaged;
          events_.push_back(e);
          transition(StateKind::AvoidObstacles);
          break;
        }
        return follow_step(odometry, targets_[target_index_], cfg_.follow());

      case StateKind::AvoidObstacles:
        if (distance(odometry.position(), goal_) <= tol) {
          stop(StopReason::ReachedGoal);
          return {};
        }
        if (settled) {
          pending_cause_ = ReplanCause::AvoidanceSettled;
          transition(StateKind::PrepareMap);
          break;
        }
        return {last_avoidance_.speed, last_avoidance_.turn_rate};

      case StateKind::Stop:
        return {};
    }
  }
  return {};
}

double NavController::frontal_gap(const LaserScan & scan, double half_width)
{
  double gap = std::numeric_limits<double>::infinity();
  for (const auto & b : scan.beams) {
    if (!b.hit) {
      continue;
    }
    const double ahead = b.range * std::cos(b.bearing);
    const double lateral = b.range * std::sin(b.bearing);
    if (ahead > 0.0 && std::abs(lateral) < half_width) {
      gap = std::min(gap, ahead);
    }
  }
  return gap;
}

VelocityCommand NavController::guard(const VelocityCommand & cmd, const LaserScan & scan) const
{
  if (!cfg_.collision_guard || cmd.v <= 0.0) {
    return cmd;
  }
  const double gap = frontal_gap(scan, cfg_.robot_radius);
  const double cap =
    std::max(0.0, (gap - cfg_.robot_radius - cfg_.safety_distance) / cfg_.guard_time);
  return {std::min(cmd.v, cap), cmd.omega};
}

}  // namespace wavenav
