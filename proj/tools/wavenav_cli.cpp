// wavenav: plan, simulate and inspect wavefront + fuzzy navigation runs.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "wavenav/error.hpp"
#include "wavenav/fuzzy.hpp"
#include "wavenav/scenario.hpp"

namespace
{

constexpr int kExitOk = 0;
constexpr int kExitNotReached = 2;
constexpr int kExitInputError = 3;

using namespace wavenav;

Scenario load_scenario(const std::string & path)
{
  const auto base = std::filesystem::path(path).parent_path();
  return parse_scenario(read_file(path), base.empty() ? std::filesystem::path(".") : base);
}

std::optional<std::uint64_t> env_seed()
{
  const char * v = std::getenv("WAVENAV_SEED");
  if (v == nullptr || *v == '\0') {
    return std::nullopt;
  }
  std::size_t used = 0;
  const std::string text(v);
  const auto seed = std::stoull(text, &used);
  if (used != text.size()) {
    throw Error(ErrorCode::SchemaError, "WAVENAV_SEED is not an unsigned integer");
  }
  return seed;
}

Vec2 parse_point(const std::string & text)
{
  std::istringstream in(text);
  Vec2 p;
  char comma = 0;
  if (!(in >> p.x >> comma >> p.y) || comma != ',' || !in.eof()) {
    throw Error(ErrorCode::SchemaError, "expected x,y but got '" + text + "'");
  }
  return p;
}

void print_plan(const PlanReport & report)
{
  std::cout << std::fixed << std::setprecision(3);
  std::cout << "cells: " << report.plan.cells.size() << "\n";
  std::cout << "steps: " << report.plan.steps.size() << "\n";
  for (std::size_t i = 0; i < report.plan.steps.size(); ++i) {
    const auto & s = report.plan.steps[i];
    std::cout << "  " << i + 1 << ": heading " << std::setw(8) << s.heading * 180.0 / std::numbers::pi
              << " deg, length " << s.length << " m, waypoint (" << s.end_cell.x << ","
              << s.end_cell.y << ")\n";
  }
  std::cout << "path length: " << report.plan.length() << " m\n";
  std::cout << "propagate+extract: " << report.search_ms << " ms\n";
  std::cout << "total planning: " << report.total_ms << " ms\n";
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Wavefront planning with fuzzy obstacle avoidance"};
  app.require_subcommand(1);

  // plan
  auto * plan_cmd = app.add_subcommand("plan", "Plan once on a map and report steps and timing");
  std::string plan_scenario;
  std::string plan_map;
  double plan_resolution = 0.05;
  std::string plan_start;
  std::string plan_goal;
  std::string plan_metric;
  std::optional<double> plan_safety;
  std::optional<double> plan_min_step;
  std::string plan_out;
  plan_cmd->add_option("--scenario", plan_scenario, "Scenario JSON (uses its provided map)");
  plan_cmd->add_option("--map", plan_map, "PGM map (alternative to --scenario)");
  plan_cmd->add_option("--resolution", plan_resolution, "m per cell for --map");
  plan_cmd->add_option("--start", plan_start, "start x,y in m");
  plan_cmd->add_option("--goal", plan_goal, "goal x,y in m");
  plan_cmd->add_option("--metric", plan_metric, "manhattan | chamfer | chamfer:<orth>,<diag>");
  plan_cmd->add_option("--safety-distance", plan_safety, "m added to the robot radius");
  plan_cmd->add_option("--min-step", plan_min_step, "smoothing threshold in m");
  plan_cmd->add_option("--out-dir", plan_out, "write field.pgm and path.pgm here");

  // run
  auto * run_cmd = app.add_subcommand("run", "Simulate a scenario");
  run_cmd->footer(
    "Outputs in --out-dir:\n"
    "  trajectory.csv  columns t,x,y,theta,v,omega,state (one row per control cycle)\n"
    "  events.jsonl    one JSON record per controller event\n"
    "  summary.json    reached, stop_reason, sim_time, path_length, replan_count,\n"
    "                  min_clearance, collision_count, event_count\n"
    "  frame_*.ppm     only with --render-every\n"
    "Exit codes: 0 reached, 2 not reached, 3 input error.\n"
    "WAVENAV_SEED overrides the scenario seed; --seed overrides both.");
  std::string run_scenario;
  std::string run_out;
  std::optional<std::uint64_t> run_seed;
  int render_every = 0;
  bool quiet = false;
  run_cmd->add_option("--scenario", run_scenario, "Scenario JSON")->required();
  run_cmd->add_option("--out-dir", run_out, "Artifact directory");
  run_cmd->add_option("--seed", run_seed, "Seed override");
  run_cmd->add_option("--render-every", render_every, "Write a PPM frame every N cycles")
    ->check(CLI::NonNegativeNumber);
  run_cmd->add_flag("--quiet", quiet, "Suppress the summary on stdout");

  // dump-rules
  auto * dump_cmd = app.add_subcommand("dump-rules", "Print membership functions and rule tables");
  std::string dump_scenario;
  dump_cmd->add_option("--scenario", dump_scenario, "Scenario JSON whose config to use");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  if (*plan_cmd) {
    try {
      NavConfig cfg;
      std::optional<OccupancyGrid> map;
      Vec2 start{};
      Vec2 goal{};
      if (!plan_scenario.empty()) {
        Scenario sc = load_scenario(plan_scenario);
        cfg = sc.config;
        map.emplace(std::move(sc.provided));
        start = sc.start.position();
        goal = sc.goal;
      } else {
        if (plan_map.empty() || plan_start.empty() || plan_goal.empty()) {
          std::cerr << "plan: need --scenario, or --map with --start and --goal\n";
          return kExitInputError;
        }
        cfg.resolution = plan_resolution;
        map.emplace(load_map(read_file(plan_map), plan_resolution, cfg.occupancy_threshold));
      }
      if (!plan_start.empty()) {
        start = parse_point(plan_start);
      }
      if (!plan_goal.empty()) {
        goal = parse_point(plan_goal);
      }
      if (!plan_metric.empty()) {
        const auto m = parse_metric(plan_metric);
        if (!m) {
          std::cerr << "plan: bad --metric '" << plan_metric << "'\n";
          return kExitInputError;
        }
        cfg.metric = *m;
      }
      if (plan_safety) {
        cfg.safety_distance = *plan_safety;
      }
      if (plan_min_step) {
        cfg.min_step_length = *plan_min_step;
      }
      cfg.validate();

      const PlanReport report = plan_once(*map, start, goal, cfg);
      print_plan(report);
      if (!plan_out.empty()) {
        std::filesystem::create_directories(plan_out);
        write_file((std::filesystem::path(plan_out) / "field.pgm").string(), encode_pgm(report.field));
        write_file((std::filesystem::path(plan_out) / "path.pgm").string(), encode_pgm(report.path));
      }
      return kExitOk;
    } catch (const Error & e) {
      std::cerr << "plan: " << e.what() << "\n";
      switch (e.code()) {
        case ErrorCode::NoPath:
        case ErrorCode::StartBlocked:
        case ErrorCode::GoalBlocked:
          return kExitNotReached;
        default:
          return kExitInputError;
      }
    } catch (const std::exception & e) {
      std::cerr << "plan: " << e.what() << "\n";
      return kExitInputError;
    }
  }

  if (*run_cmd) {
    RunResult result;
    try {
      Scenario sc = load_scenario(run_scenario);
      if (const auto s = env_seed()) {
        sc.seed = *s;
      }
      if (run_seed) {
        sc.seed = *run_seed;
      }
      result = run(sc, RunOptions{render_every});
      if (!run_out.empty()) {
        write_artifacts(result, run_out);
      }
    } catch (const std::exception & e) {
      std::cerr << "run: " << e.what() << "\n";
      return kExitInputError;
    }
    if (!quiet) {
      std::cout << result.summary_json;
    }
    return result.summary.reached ? kExitOk : kExitNotReached;
  }

  if (*dump_cmd) {
    try {
      NavConfig cfg;
      if (!dump_scenario.empty()) {
        cfg = load_scenario(dump_scenario).config;
      }
      std::cout << describe_rules(FuzzyAvoider(cfg.avoidance()));
      return kExitOk;
    } catch (const std::exception & e) {
      std::cerr << "dump-rules: " << e.what() << "\n";
      return kExitInputError;
    }
  }
  return kExitInputError;
}
