#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "wavenav/error.hpp"
#include "wavenav/raster.hpp"
#include "wavenav/scenario.hpp"

using namespace wavenav;
namespace fs = std::filesystem;

namespace
{

const fs::path kScenarios = WAVENAV_SCENARIO_DIR;
const std::string kCli = WAVENAV_CLI_PATH;

std::string minimal(const std::string & extra = "")
{
  return R"({"ground_truth_map": "maps/open.pgm", "provided_map": "maps/open.pgm",
    "start": {"x": 1.0, "y": 2.0, "theta": 0.0}, "goal": {"x": 4.0, "y": 2.0}, "seed": 3)" +
    extra + "}";
}

ErrorCode code_of(const std::string & doc)
{
  try {
    parse_scenario(doc, kScenarios);
  } catch (const Error & e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::Io;
}

std::string message_of(const std::string & doc)
{
  try {
    parse_scenario(doc, kScenarios);
  } catch (const Error & e) {
    return e.what();
  }
  return {};
}

struct Shell
{
  int status;
  std::string out;
};

Shell shell(const std::string & cmd)
{
  Shell r{-1, {}};
  FILE * pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (pipe == nullptr) {
    return r;
  }
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) {
    r.out.append(buf, n);
  }
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

fs::path temp_dir(const std::string & name)
{
  const auto d = fs::temp_directory_path() / ("wavenav_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

// Writes a scenario to a scratch directory, pointing map paths at the shipped maps.
fs::path write_scenario(const std::string & name, std::string text)
{
  const std::string maps = (kScenarios / "maps").string() + "/";
  for (auto at = text.find("maps/"); at != std::string::npos; at = text.find("maps/", at + maps.size())) {
    text.replace(at, 5, maps);
  }
  const auto p = temp_dir("scenario_" + name) / "scenario.json";
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST(ParseScenario, MinimalDocument)
{
  const auto sc = parse_scenario(minimal(), kScenarios);
  EXPECT_EQ(sc.name, "scenario");
  EXPECT_EQ(sc.seed, 3u);
  EXPECT_EQ(sc.start.x, 1.0);
  EXPECT_EQ(sc.goal.x, 4.0);
  EXPECT_EQ(sc.ground_truth.spec().width_cells, 120);
  EXPECT_EQ(sc.ground_truth.spec().height_cells, 80);
  EXPECT_TRUE(sc.entities.empty());
  EXPECT_EQ(sc.config.v_max, NavConfig{}.v_max);
}

TEST(ParseScenario, UnknownKeyIsNamed)
{
  const auto doc = minimal(R"(, "config": {"velocity": 0.2})");
  EXPECT_EQ(code_of(doc), ErrorCode::SchemaError);
  EXPECT_NE(message_of(doc).find("config.velocity"), std::string::npos);
  EXPECT_NE(message_of(minimal(R"(, "extra": 1)")).find("extra"), std::string::npos);
}

TEST(ParseScenario, SchemaErrors)
{
  EXPECT_EQ(code_of("{"), ErrorCode::SchemaError);
  EXPECT_EQ(code_of(minimal(R"(, "config": {"v_max": "fast"})")), ErrorCode::SchemaError);
  EXPECT_EQ(code_of(minimal(R"(, "config": {"collision_guard": 1})")), ErrorCode::SchemaError);
  EXPECT_EQ(code_of(minimal(R"(, "config": {"metric": "euclid"})")), ErrorCode::SchemaError);
  EXPECT_EQ(code_of(minimal(R"(, "entities": [{"x": 1}])")), ErrorCode::SchemaError);
  EXPECT_EQ(code_of(R"({"ground_truth_map": "maps/open.pgm", "provided_map": "empty",
    "start": {"x": 1, "y": 1}, "goal": {"x": 2, "y": 2}, "seed": -1})"), ErrorCode::SchemaError);
  EXPECT_NE(message_of(R"({"provided_map": "empty"})").find("ground_truth_map"), std::string::npos);
}

TEST(ParseScenario, ConfigOverrides)
{
  const auto sc = parse_scenario(minimal(
    R"(, "config": {"profile": "real_world", "metric": "manhattan", "timeout": 12,
        "collision_guard": false, "membership": {"distance": {"ZE": [0, 0, 0.4], "PS": [0, 0.4, 1], "PM": [0.4, 1, 1]}}})"),
    kScenarios);
  EXPECT_EQ(sc.config.v_max, 0.2);
  EXPECT_EQ(sc.config.occupancy_threshold, 10.0);
  EXPECT_EQ(sc.config.metric.kind, Metric::Kind::Manhattan);
  EXPECT_EQ(*sc.config.timeout, 12.0);
  EXPECT_FALSE(sc.config.collision_guard);
  EXPECT_EQ(sc.config.membership.distance[0][2], 0.4);
}

TEST(ParseScenario, EmptyProvidedMap)
{
  const auto sc = parse_scenario(R"({"ground_truth_map": "maps/exploration.pgm", "provided_map": "empty",
    "start": {"x": 1, "y": 3}, "goal": {"x": 7, "y": 3}, "seed": 0})", kScenarios);
  EXPECT_EQ(sc.provided.spec(), sc.ground_truth.spec());
  EXPECT_EQ(sc.provided.wall_count(), 0u);
  EXPECT_GT(sc.ground_truth.wall_count(), 0u);
}

TEST(ParseScenario, MapMismatchAndMissingFile)
{
  EXPECT_EQ(code_of(R"({"ground_truth_map": "maps/open.pgm", "provided_map": "maps/gap.pgm",
    "start": {"x": 1, "y": 1}, "goal": {"x": 2, "y": 2}, "seed": 0})"), ErrorCode::MapMismatch);
  EXPECT_EQ(code_of(R"({"ground_truth_map": "maps/nope.pgm", "provided_map": "empty",
    "start": {"x": 1, "y": 1}, "goal": {"x": 2, "y": 2}, "seed": 0})"), ErrorCode::Io);
}

TEST(ShippedScenarios, AllParse)
{
  for (const auto * name : {"straight", "gap", "exploration", "dynamic", "ring"}) {
    EXPECT_NO_THROW(parse_scenario(read_file((kScenarios / (std::string(name) + ".json")).string()),
      kScenarios)) << name;
  }
}

TEST(Run, StraightScenario)
{
  const auto sc = parse_scenario(read_file((kScenarios / "straight.json").string()), kScenarios);
  const auto r = run(sc);
  EXPECT_TRUE(r.summary.reached);
  EXPECT_EQ(r.summary.replan_count, 0);
  EXPECT_EQ(r.summary.collision_count, 0);
  // Stops within goal tolerance of the 3 m line.
  const double tol = sc.config.effective_goal_tolerance();
  EXPECT_GE(r.summary.path_length, 3.0 - tol);
  EXPECT_LE(r.summary.path_length, 3.3);

  std::istringstream csv(r.trajectory_csv);
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, kTrajectoryHeader);
  const auto summary = nlohmann::json::parse(r.summary_json);
  EXPECT_EQ(summary["reached"], true);
  EXPECT_EQ(summary["stop_reason"], "ReachedGoal");
  EXPECT_EQ(summary["event_count"], r.summary.events.size());
}

TEST(Run, ByteIdenticalForSameSeed)
{
  const auto sc = parse_scenario(read_file((kScenarios / "dynamic.json").string()), kScenarios);
  auto shorter = sc;
  shorter.max_sim_time = 20.0;
  const auto a = run(shorter);
  const auto b = run(shorter);
  EXPECT_EQ(a.trajectory_csv, b.trajectory_csv);
  EXPECT_EQ(a.events_jsonl, b.events_jsonl);
  EXPECT_EQ(a.summary_json, b.summary_json);
  shorter.seed = 99;
  EXPECT_NE(run(shorter).trajectory_csv, a.trajectory_csv);
}

TEST(Run, EventsAreJsonLines)
{
  const auto sc = parse_scenario(read_file((kScenarios / "straight.json").string()), kScenarios);
  const auto r = run(sc);
  std::istringstream in(r.events_jsonl);
  std::string line;
  int n = 0;
  double t = 0.0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_GE(j["t"].get<double>(), t);
    t = j["t"].get<double>();
    ++n;
  }
  EXPECT_EQ(n, static_cast<int>(r.summary.events.size()));
}

TEST(PlanOnce, ReportsStepsAndImages)
{
  const auto sc = parse_scenario(read_file((kScenarios / "straight.json").string()), kScenarios);
  const auto rep = plan_once(sc.provided, sc.start.position(), sc.goal, sc.config);
  EXPECT_EQ(rep.plan.steps.size(), 1u);
  EXPECT_EQ(rep.field.width, 120);
  EXPECT_GE(rep.total_ms, rep.search_ms);
}

TEST(Cli, ExitCodes)
{
  const auto out = temp_dir("cli");
  EXPECT_EQ(shell(kCli + " run --quiet --scenario " + (kScenarios / "straight.json").string() +
    " --out-dir " + out.string()).status, 0);
  EXPECT_TRUE(fs::exists(out / "trajectory.csv"));
  EXPECT_TRUE(fs::exists(out / "events.jsonl"));
  EXPECT_TRUE(fs::exists(out / "summary.json"));

  // Goal inside the closed ring.
  EXPECT_EQ(shell(kCli + " plan --map " + (kScenarios / "maps" / "ring.pgm").string() +
    " --start 1.5,4 --goal 7,4").status, 2);
  const auto quick = write_scenario("timeout", minimal(R"(, "config": {"timeout": 1.0})"));
  EXPECT_EQ(shell(kCli + " run --quiet --scenario " + quick.string()).status, 2);

  const auto bad = write_scenario("bad", minimal(R"(, "config": {"velocity": 1})"));
  EXPECT_EQ(shell(kCli + " run --scenario " + bad.string()).status, 3);
  EXPECT_EQ(shell(kCli + " run --scenario /nonexistent.json").status, 3);
  EXPECT_EQ(shell(kCli + " frobnicate").status, 3);
  EXPECT_EQ(shell(kCli + " plan --map /nonexistent.pgm --start 1,1 --goal 2,2").status, 3);
}

TEST(Cli, SeedFromEnvironmentAndFlag)
{
  const auto sc = (kScenarios / "straight.json").string();
  const auto env = shell("WAVENAV_SEED=77 " + kCli + " run --scenario " + sc);
  EXPECT_NE(env.out.find("\"seed\": 77"), std::string::npos);
  const auto flag = shell("WAVENAV_SEED=77 " + kCli + " run --seed 5 --scenario " + sc);
  EXPECT_NE(flag.out.find("\"seed\": 5"), std::string::npos);
  EXPECT_EQ(shell("WAVENAV_SEED=abc " + kCli + " run --scenario " + sc).status, 3);
}

TEST(Cli, HelpDocumentsOutputs)
{
  const auto help = shell(kCli + " run --help");
  EXPECT_EQ(help.status, 0);
  EXPECT_NE(help.out.find("trajectory.csv"), std::string::npos);
  EXPECT_NE(help.out.find("Exit codes"), std::string::npos);
  const auto rules = shell(kCli + " dump-rules");
  EXPECT_EQ(rules.status, 0);
  EXPECT_NE(rules.out.find("speed rules"), std::string::npos);
}
