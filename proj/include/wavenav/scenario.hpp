#ifndef WAVENAV_SCENARIO_HPP_
#define WAVENAV_SCENARIO_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wavenav/grid_map.hpp"
#include "wavenav/nav_controller.hpp"
#include "wavenav/wavefront.hpp"

namespace wavenav
{

struct EntitySpec
{
  Pose spawn;
  double radius{0.25};  // m
  double speed{0.2};    // m/s
};

/// A fully loaded simulation setup. The seed determines every random draw.
struct Scenario
{
  std::string name{"scenario"};
  OccupancyGrid ground_truth;
  OccupancyGrid provided;
  Pose start;
  Vec2 goal;
  std::vector<EntitySpec> entities;
  NavConfig config;
  std::uint64_t seed{0};
  double max_sim_time{600.0};  // s, hard cap on the simulation loop
};

/// Parses a JSON scenario. Map paths are resolved against `base_dir`;
/// "provided_map": "empty" yields an all-free map with the ground truth's
/// extent. Unknown keys are rejected.
/// Throws SchemaError (message carries the key path), MapMismatch,
/// MalformedMap, Io.
Scenario parse_scenario(std::string_view text, const std::filesystem::path & base_dir = ".");

/// Applies a JSON object of NavConfig overrides; `path` prefixes error messages.
void apply_config_overrides(NavConfig & cfg, const std::string & json_text,
  const std::string & path = "config");

struct RunSummary
{
  bool reached{false};
  StopReason stop_reason{StopReason::Timeout};
  double sim_time{0.0};       // s
  double path_length{0.0};    // m actually travelled
  int replan_count{0};
  double min_clearance{0.0};  // m, robot center to nearest true obstacle surface
  int collision_count{0};     // entries into clearance < robot_radius
  std::vector<NavEvent> events;
};

struct RunOptions
{
  int render_every{0};  // ticks between frames; 0 disables
};

struct RunResult
{
  RunSummary summary;
  std::string trajectory_csv;
  std::string events_jsonl;
  std::string summary_json;
  std::vector<std::pair<std::string, std::string>> frames;  // (file name, PPM bytes)
};

/// Column order of the trajectory CSV.
inline constexpr std::string_view kTrajectoryHeader = "t,x,y,theta,v,omega,state";

/// Fixed-step loop: entities step, scan, controller tick, robot integrate.
/// Identical scenarios produce byte-identical artifacts.
RunResult run(const Scenario & scenario, const RunOptions & options = {});

/// Writes trajectory.csv, events.jsonl, summary.json and any frames.
void write_artifacts(const RunResult & result, const std::filesystem::path & out_dir);

std::string events_to_jsonl(const std::vector<NavEvent> & events);

struct PlanReport
{
  MotionPlan plan;
  double search_ms{0.0};  // propagate + extract, wall clock
  double total_ms{0.0};   // inflate + search + compress + smooth
  GrayImage field;
  GrayImage path;
};

/// One-shot planning on a map with its current walls/objects.
/// Throws StartBlocked, GoalBlocked, NoPath, OutOfBounds.
PlanReport plan_once(const OccupancyGrid & map, Vec2 start, Vec2 goal, const NavConfig & cfg);

}  // namespace wavenav

#endif  // WAVENAV_SCENARIO_HPP_
