#ifndef WAVENAV_NAV_CONTROLLER_HPP_
#define WAVENAV_NAV_CONTROLLER_HPP_

#include <optional>
#include <utility>
#include <vector>

#include "wavenav/fuzzy.hpp"
#include "wavenav/grid_map.hpp"
#include "wavenav/robot_sim.hpp"
#include "wavenav/scan.hpp"
#include "wavenav/wavefront.hpp"

namespace wavenav
{

/// Tunables. Defaults are the simulation profile (0.3 m/s, threshold 7,
/// ageing 0.14); see NavConfig::real_world() for the slower hardware profile.
struct NavConfig
{
  double resolution{0.05};        // m per cell, used when loading maps
  double robot_radius{0.275};     // m, round footprint of diameter 0.55
  double safety_distance{0.07};   // m
  std::optional<double> inflation_radius;  // m, default robot_radius + safety_distance
  double avoidance_range{1.1};    // m
  double occupancy_threshold{7.0};
  double aging_factor{0.14};      // confidence removed per control cycle
  double v_max{0.3};              // m/s
  double omega_max{1.0};          // rad/s
  double epsilon_settle{0.05};    // rad/s
  double min_step_length{0.3};    // m
  std::optional<double> goal_tolerance;  // m, default 1.5 * resolution
  std::optional<double> timeout;  // s, default 10 * straight-line distance / v_max
  Metric metric{Metric::chamfer()};
  MembershipConfig membership{};
  double k_omega{1.5};            // 1/s
  double dt{0.1};                 // s
  double map_range{3.0};          // m, detections farther than this are not mapped
  int laser_beams{181};
  double laser_max_range{8.0};    // m
  double laser_noise_sd{0.0};     // m
  double odometry_noise_sd{0.0};  // m (and rad) per step
  // Forward-speed cap from the laser: inside the corridor swept by the
  // footprint, v <= (gap - robot_radius - safety_distance) / guard_time.
  bool collision_guard{true};
  double guard_time{1.0};         // s

  static NavConfig real_world();

  double effective_inflation() const
  {
    return inflation_radius.value_or(robot_radius + safety_distance);
  }
  double effective_goal_tolerance() const { return goal_tolerance.value_or(1.5 * resolution); }
  double effective_timeout(Vec2 start, Vec2 goal) const
  {
    return timeout.value_or(10.0 * distance(start, goal) / v_max);
  }
  AvoidanceConfig avoidance() const { return {avoidance_range, v_max, omega_max, membership}; }
  FollowConfig follow() const { return {k_omega, v_max, omega_max}; }

  /// Throws Error(SchemaError) naming the first invalid field.
  void validate() const;
};

enum class StateKind { Initialise, PrepareMap, PlanPath, FollowPath, AvoidObstacles, Stop };
enum class StopReason { ReachedGoal, NoPath, StartOrGoalOccupied, Timeout, OffMap };
enum class ReplanCause { AvoidanceSettled, WaypointsExhausted };

const char * to_string(StateKind s);
const char * to_string(StopReason r);
const char * to_string(ReplanCause c);

/// The transition edges the controller may take.
bool is_legal_transition(StateKind from, StateKind to);

struct NavEvent
{
  enum class Kind { StateChanged, PathPlanned, Replanned, ObstacleEngaged, GoalReached, Stopped };

  double time{0.0};
  Kind kind{Kind::StateChanged};
  StateKind from{StateKind::Initialise};
  StateKind to{StateKind::Initialise};
  int step_count{0};
  double path_length{0.0};
  ReplanCause cause{ReplanCause::AvoidanceSettled};
  StopReason reason{StopReason::ReachedGoal};
};

const char * to_string(NavEvent::Kind k);

/// Mapping, planning, path following and fuzzy avoidance in one loop:
///
///   Initialise -> PrepareMap -> PlanPath -> FollowPath <-> AvoidObstacles
///
/// Settled avoidance goes back through PrepareMap for a fresh plan. Every
/// state can drop into Stop (goal reached, no path, occupied start or goal,
/// timeout, off the map).
class NavController
{
public:
  /// Throws StartOutOfBounds / GoalOutOfBounds.
  NavController(OccupancyGrid map, const Pose & start, Vec2 goal, NavConfig cfg);

  /// One control cycle. The grid is updated with the scan and aged first,
  /// and objects under the robot's own footprint are cleared; PrepareMap and PlanPath then run to completion inside the same cycle, so
  /// the returned command always comes from FollowPath, AvoidObstacles or Stop,
  /// with its forward speed capped by the collision guard.
  /// Throws Error(TickAfterStop) once stopped.
  VelocityCommand tick(const Pose & odometry, const LaserScan & scan, double dt);

  /// Free distance ahead inside the corridor of the given half width, from
  /// the hit beams of `scan` (sensor frame); +inf when the corridor is clear.
  static double frontal_gap(const LaserScan & scan, double half_width);

  /// Forces Stop from outside (e.g. the simulation wall-clock cap).
  void abort(StopReason reason);

  StateKind state() const { return state_; }
  bool stopped() const { return state_ == StateKind::Stop; }
  std::optional<StopReason> stop_reason() const { return stop_reason_; }
  const std::vector<NavEvent> & events() const { return events_; }
  const OccupancyGrid & grid() const { return grid_; }
  const std::optional<CSpaceGrid> & cspace() const { return cspace_; }
  const std::optional<MotionPlan> & plan() const { return plan_; }
  /// World positions the robot steers at: waypoint cell centers, with the
  /// exact goal point substituted for the last one.
  const std::vector<Vec2> & targets() const { return targets_; }
  std::size_t target_index() const { return target_index_; }
  int replan_count() const { return replan_count_; }
  int plan_count() const { return plan_count_; }
  double elapsed() const { return elapsed_; }
  double timeout() const { return timeout_; }
  Vec2 goal() const { return goal_; }
  const NavConfig & config() const { return cfg_; }
  const AvoidanceCommand & last_avoidance() const { return last_avoidance_; }

private:
  void transition(StateKind to);
  void stop(StopReason reason);
  void plan_path(const Pose & pose);
  Vec2 current_target() const;
  void advance_targets(Vec2 position);
  VelocityCommand run_states(const Pose & odometry, bool settled);
  VelocityCommand guard(const VelocityCommand & cmd, const LaserScan & scan) const;

  NavConfig cfg_;
  FuzzyAvoider avoider_;
  OccupancyGrid grid_;
  Vec2 goal_;
  double timeout_;
  StateKind state_{StateKind::Initialise};
  std::optional<StopReason> stop_reason_;
  std::optional<CSpaceGrid> cspace_;
  std::optional<MotionPlan> plan_;
  std::vector<Vec2> targets_;
  std::size_t target_index_{0};
  ReplanCause pending_cause_{ReplanCause::AvoidanceSettled};
  AvoidanceCommand last_avoidance_{};
  std::vector<NavEvent> events_;
  double elapsed_{0.0};
  int plan_count_{0};
  int replan_count_{0};
};

}  // namespace wavenav

#endif  // WAVENAV_NAV_CONTROLLER_HPP_
