#include "wavenav/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "wavenav/error.hpp"
#include "wavenav/laser.hpp"
#include "wavenav/rng.hpp"
#include "wavenav/robot_sim.hpp"

namespace wavenav
{

using json = nlohmann::json;

namespace
{

/// Reads keys out of a JSON object and rejects whatever is left unread.
class ObjectReader
{
public:
  ObjectReader(const json & j, std::string path) : j_(j), path_(std::move(path))
  {
    if (!j_.is_object()) {
      fail(path_, "expected an object");
    }
  }

  [[noreturn]] static void fail(const std::string & path, const std::string & what)
  {
    throw Error(ErrorCode::SchemaError, path + ": " + what);
  }

  std::string key_path(const std::string & key) const
  {
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(const std::string & key)
  {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json & at(const std::string & key)
  {
    if (!has(key)) {
      fail(key_path(key), "missing required key");
    }
    return j_.at(key);
  }

  double number(const std::string & key)
  {
    const auto & v = at(key);
    if (!v.is_number()) {
      fail(key_path(key), "expected a number");
    }
    return v.get<double>();
  }

  double number(const std::string & key, double fallback)
  {
    return has(key) ? number(key) : fallback;
  }

  std::string string(const std::string & key)
  {
    const auto & v = at(key);
    if (!v.is_string()) {
      fail(key_path(key), "expected a string");
    }
    return v.get<std::string>();
  }

  void finish() const
  {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) {
        fail(key_path(it.key()), "unknown key");
      }
    }
  }

private:
  const json & j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::array<double, 3> read_triangle(const json & j, const std::string & path)
{
  if (!j.is_array() || j.size() != 3) {
    ObjectReader::fail(path, "expected [a, b, c]");
  }
  std::array<double, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) {
    if (!j[i].is_number()) {
      ObjectReader::fail(path, "expected numbers");
    }
    out[i] = j[i].get<double>();
  }
  return out;
}

void read_membership(MembershipConfig & m, const json & j, const std::string & path)
{
  ObjectReader r(j, path);
  if (r.has("angle")) {
    ObjectReader a(r.at("angle"), r.key_path("angle"));
    for (const auto t : kAllTerms) {
      if (a.has(to_string(t))) {
        m.angle[static_cast<int>(t)] = read_triangle(a.at(to_string(t)), a.key_path(to_string(t)));
      }
    }
    a.finish();
  }
  if (r.has("distance")) {
    ObjectReader d(r.at("distance"), r.key_path("distance"));
    for (std::size_t i = 0; i < kMagnitudeTerms.size(); ++i) {
      const char * name = to_string(kMagnitudeTerms[i]);
      if (d.has(name)) {
        m.distance[i] = read_triangle(d.at(name), d.key_path(name));
      }
    }
    d.finish();
  }
  r.finish();
}

void read_config(NavConfig & cfg, const json & j, const std::string & path)
{
  ObjectReader r(j, path);
  if (r.has("profile")) {
    const auto profile = r.string("profile");
    if (profile == "real_world") {
      cfg = NavConfig::real_world();
    } else if (profile != "simulation") {
      ObjectReader::fail(r.key_path("profile"), "expected \"simulation\" or \"real_world\"");
    }
  }
  cfg.resolution = r.number("resolution", cfg.resolution);
  cfg.robot_radius = r.number("robot_radius", cfg.robot_radius);
  cfg.safety_distance = r.number("safety_distance", cfg.safety_distance);
  if (r.has("inflation_radius")) {
    cfg.inflation_radius = r.number("inflation_radius");
  }
  cfg.avoidance_range = r.number("avoidance_range", cfg.avoidance_range);
  cfg.occupancy_threshold = r.number("occupancy_threshold", cfg.occupancy_threshold);
  cfg.aging_factor = r.number("aging_factor", cfg.aging_factor);
  cfg.v_max = r.number("v_max", cfg.v_max);
  cfg.omega_max = r.number("omega_max", cfg.omega_max);
  cfg.epsilon_settle = r.number("epsilon_settle", cfg.epsilon_settle);
  cfg.min_step_length = r.number("min_step_length", cfg.min_step_length);
  if (r.has("goal_tolerance")) {
    cfg.goal_tolerance = r.number("goal_tolerance");
  }
  if (r.has("timeout")) {
    cfg.timeout = r.number("timeout");
  }
  if (r.has("metric")) {
    const auto text = r.string("metric");
    const auto m = parse_metric(text);
    if (!m) {
      ObjectReader::fail(r.key_path("metric"),
        "expected \"manhattan\", \"chamfer\" or \"chamfer:<orth>,<diag>\"");
    }
    cfg.metric = *m;
  }
  if (r.has("membership")) {
    read_membership(cfg.membership, r.at("membership"), r.key_path("membership"));
  }
  cfg.k_omega = r.number("k_omega", cfg.k_omega);
  cfg.dt = r.number("dt", cfg.dt);
  cfg.map_range = r.number("map_range", cfg.map_range);
  if (r.has("laser_beams")) {
    const auto & v = r.at("laser_beams");
    if (!v.is_number_integer()) {
      ObjectReader::fail(r.key_path("laser_beams"), "expected an integer");
    }
    cfg.laser_beams = v.get<int>();
  }
  cfg.laser_max_range = r.number("laser_max_range", cfg.laser_max_range);
  cfg.laser_noise_sd = r.number("laser_noise_sd", cfg.laser_noise_sd);
  cfg.odometry_noise_sd = r.number("odometry_noise_sd", cfg.odometry_noise_sd);
  if (r.has("collision_guard")) {
    const auto & v = r.at("collision_guard");
    if (!v.is_boolean()) {
      ObjectReader::fail(r.key_path("collision_guard"), "expected true or false");
    }
    cfg.collision_guard = v.get<bool>();
  }
  cfg.guard_time = r.number("guard_time", cfg.guard_time);
  r.finish();
  try {
    cfg.validate();
  } catch (const Error & e) {
    ObjectReader::fail(path, e.what());
  }
  try {
    FuzzyAvoider check(cfg.avoidance());
  } catch (const std::invalid_argument & e) {
    ObjectReader::fail(r.key_path("membership"), e.what());
  }
}

Pose read_pose(const json & j, const std::string & path, bool with_theta)
{
  ObjectReader r(j, path);
  Pose p;
  p.x = r.number("x");
  p.y = r.number("y");
  if (with_theta) {
    p.theta = normalize_angle(r.number("theta", 0.0));
  }
  r.finish();
  return p;
}

json parse_json(std::string_view text)
{
  try {
    return json::parse(text);
  } catch (const json::parse_error & e) {
    throw Error(ErrorCode::SchemaError, std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

void apply_config_overrides(NavConfig & cfg, const std::string & json_text,
  const std::string & path)
{
  read_config(cfg, parse_json(json_text), path);
}

Scenario parse_scenario(std::string_view text, const std::filesystem::path & base_dir)
{
  const json doc = parse_json(text);
  ObjectReader r(doc, "");

  NavConfig cfg;
  if (r.has("config")) {
    read_config(cfg, r.at("config"), "config");
  }

  Vec2 origin{};
  if (r.has("origin")) {
    const auto & o = r.at("origin");
    if (!o.is_array() || o.size() != 2 || !o[0].is_number() || !o[1].is_number()) {
      ObjectReader::fail("origin", "expected [x, y]");
    }
    origin = {o[0].get<double>(), o[1].get<double>()};
  }

  auto load = [&](const std::string & file) {
    const auto p = std::filesystem::path(file).is_absolute() ? std::filesystem::path(file)
                                                             : base_dir / file;
    return load_map(read_file(p.string()), cfg.resolution, cfg.occupancy_threshold, origin);
  };
  OccupancyGrid truth = load(r.string("ground_truth_map"));
  const auto provided_name = r.string("provided_map");
  OccupancyGrid provided = provided_name == "empty"
    ? OccupancyGrid::empty(truth.spec(), cfg.occupancy_threshold)
    : load(provided_name);
  if (!(provided.spec() == truth.spec())) {
    throw Error(ErrorCode::MapMismatch, "provided map and ground truth differ in extent");
  }

  const Pose start = read_pose(r.at("start"), "start", true);
  const Vec2 goal = read_pose(r.at("goal"), "goal", false).position();

  std::vector<EntitySpec> entities;
  if (r.has("entities")) {
    const auto & list = r.at("entities");
    if (!list.is_array()) {
      ObjectReader::fail("entities", "expected an array");
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = "entities[" + std::to_string(i) + "]";
      ObjectReader e(list[i], path);
      EntitySpec spec;
      spec.spawn.x = e.number("x");
      spec.spawn.y = e.number("y");
      spec.spawn.theta = normalize_angle(e.number("theta", 0.0));
      spec.radius = e.number("radius", spec.radius);
      spec.speed = e.number("speed", spec.speed);
      e.finish();
      if (!(spec.radius > 0.0) || !(spec.speed >= 0.0)) {
        ObjectReader::fail(path, "radius must be > 0 and speed >= 0");
      }
      entities.push_back(spec);
    }
  }

  const auto & seed_json = r.at("seed");
  if (!seed_json.is_number_unsigned() && !seed_json.is_number_integer()) {
    ObjectReader::fail("seed", "expected a non-negative integer");
  }
  if (seed_json.is_number_integer() && seed_json.get<long long>() < 0) {
    ObjectReader::fail("seed", "expected a non-negative integer");
  }

  Scenario s{
    .name = r.has("name") ? r.string("name") : std::string("scenario"),
    .ground_truth = std::move(truth),
    .provided = std::move(provided),
    .start = start,
    .goal = goal,
    .entities = std::move(entities),
    .config = cfg,
    .seed = seed_json.get<std::uint64_t>(),
    .max_sim_time = r.number("max_sim_time", 600.0),
  };
  if (!(s.max_sim_time > 0.0)) {
    ObjectReader::fail("max_sim_time", "must be positive");
  }
  r.finish();
  return s;
}

namespace
{

std::string fmt(double v, int decimals = 6)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v == 0.0 ? 0.0 : v);
  return buf;
}

json event_json(const NavEvent & e)
{
  json j;
  j["t"] = std::round(e.time * 1e6) / 1e6;
  j["event"] = to_string(e.kind);
  switch (e.kind) {
    case NavEvent::Kind::StateChanged:
      j["from"] = to_string(e.from);
      j["to"] = to_string(e.to);
      break;
    case NavEvent::Kind::PathPlanned:
      j["steps"] = e.step_count;
      j["length"] = std::round(e.path_length * 1e6) / 1e6;
      break;
    case NavEvent::Kind::Replanned:
      j["cause"] = to_string(e.cause);
      break;
    case NavEvent::Kind::Stopped:
      j["reason"] = to_string(e.reason);
      break;
    case NavEvent::Kind::ObstacleEngaged:
    case NavEvent::Kind::GoalReached:
      break;
  }
  return j;
}

void paint_disc(RgbImage & img, const GridSpec & spec, Vec2 c, double radius, Rgb color)
{
  const int reach = static_cast<int>(std::ceil(radius / spec.resolution)) + 1;
  const auto center = world_to_cell(spec, c);
  if (!center) {
    return;
  }
  for (int dy = -reach; dy <= reach; ++dy) {
    for (int dx = -reach; dx <= reach; ++dx) {
      const Cell cell{center->x + dx, center->y + dy};
      if (spec.contains(cell) && distance(cell_to_world(spec, cell), c) <= radius) {
        img.at(cell.x, spec.height_cells - 1 - cell.y) = color;
      }
    }
  }
}

RgbImage render_frame(const Scenario & sc, const NavController & ctl,
  const std::vector<Vec2> & trail, const Pose & robot, const std::vector<DynamicEntity> & ents)
{
  const auto & spec = sc.ground_truth.spec();
  RgbImage img{spec.width_cells, spec.height_cells,
    std::vector<Rgb>(spec.cell_count(), Rgb{255, 255, 255})};
  const auto & grid = ctl.grid();
  for (int y = 0; y < spec.height_cells; ++y) {
    for (int x = 0; x < spec.width_cells; ++x) {
      const Cell c{x, y};
      Rgb px{255, 255, 255};
      if (ctl.cspace() && ctl.cspace()->is_blocked(c)) {
        px = {200, 255, 255};  // inflation margin
      }
      const double conf = grid.confidence(c);
      if (grid.is_wall(c)) {
        px = {0, 0, 255};  // provided wall
      } else if (conf >= grid.threshold()) {
        px = {255, 0, 255};  // current object
      } else if (conf > 0.0) {
        const auto fade = static_cast<std::uint8_t>(255 - std::lround(200.0 * conf / grid.threshold()));
        px = {255, 255, fade};  // ageing object
      }
      if (sc.ground_truth.is_wall(c) && !grid.is_wall(c) && conf <= 0.0) {
        px = {90, 90, 90};  // unseen ground truth
      }
      img.at(x, spec.height_cells - 1 - y) = px;
    }
  }
  if (ctl.plan()) {
    for (const auto & c : ctl.plan()->cells) {
      img.at(c.x, spec.height_cells - 1 - c.y) = {0, 0, 0};
    }
  }
  for (const auto & p : trail) {
    if (const auto c = world_to_cell(spec, p)) {
      img.at(c->x, spec.height_cells - 1 - c->y) = {220, 0, 0};
    }
  }
  for (const auto & e : ents) {
    paint_disc(img, spec, e.pose.position(), e.radius, {0, 170, 0});
  }
  paint_disc(img, spec, robot.position(), sc.config.robot_radius, {255, 140, 0});
  return img;
}

}  // namespace

std::string events_to_jsonl(const std::vector<NavEvent> & events)
{
  std::string out;
  for (const auto & e : events) {
    out += event_json(e).dump();
    out += '\n';
  }
  return out;
}

RunResult run(const Scenario & sc, const RunOptions & options)
{
  const NavConfig & cfg = sc.config;
  cfg.validate();
  if (!(sc.provided.spec() == sc.ground_truth.spec())) {
    throw Error(ErrorCode::MapMismatch, "provided map and ground truth differ in extent");
  }
  const double dt = cfg.dt;

  // The controller maps with the configured threshold whatever the loaded map carried.
  std::vector<std::uint8_t> walls(sc.provided.spec().cell_count());
  for (std::size_t i = 0; i < walls.size(); ++i) {
    walls[i] = sc.provided.is_wall(sc.provided.spec().cell_at(i)) ? 1 : 0;
  }
  NavController ctl(OccupancyGrid(sc.provided.spec(), std::move(walls), cfg.occupancy_threshold),
    sc.start, sc.goal, cfg);

  GroundTruthWorld world{sc.ground_truth, {}};
  std::vector<DynamicEntity> entities;
  for (std::size_t i = 0; i < sc.entities.size(); ++i) {
    const auto & e = sc.entities[i];
    entities.emplace_back(e.spawn, e.radius, e.speed, sc.seed, streams::entity_base + i);
  }
  RandomStream laser_rng(sc.seed, streams::laser_noise);
  RandomStream odom_rng(sc.seed, streams::odometry_noise);

  Pose truth = sc.start;
  Pose odom = sc.start;
  RunResult result;
  RunSummary & summary = result.summary;
  std::string & csv = result.trajectory_csv;
  csv = std::string(kTrajectoryHeader) + "\n";
  std::vector<Vec2> trail{truth.position()};

  const double clearance_window = 2.0;
  bool in_collision = false;
  auto measure = [&] {
    double c = wall_clearance(sc.ground_truth, truth.position(), clearance_window);
    for (const auto & e : entities) {
      c = std::min(c, distance(truth.position(), e.pose.position()) - e.radius);
    }
    summary.min_clearance = std::min(summary.min_clearance, c);
    const bool colliding = c < cfg.robot_radius;
    if (colliding && !in_collision) {
      ++summary.collision_count;
    }
    in_collision = colliding;
  };
  auto row = [&](double t, const Pose & p, const VelocityCommand & cmd, StateKind s) {
    csv += fmt(t, 3) + "," + fmt(p.x) + "," + fmt(p.y) + "," + fmt(p.theta) + "," + fmt(cmd.v) +
      "," + fmt(cmd.omega) + "," + to_string(s) + "\n";
  };

  summary.min_clearance = std::numeric_limits<double>::infinity();
  measure();
  row(0.0, truth, {}, ctl.state());

  double t = 0.0;
  long tick = 0;
  const long max_ticks = static_cast<long>(std::ceil(sc.max_sim_time / dt - 1e-9));
  while (!ctl.stopped()) {
    if (tick >= max_ticks) {
      ctl.abort(StopReason::Timeout);
      break;
    }
    const std::array<Disc, 1> robot_disc{Disc{truth.position(), cfg.robot_radius}};
    step_entities(sc.ground_truth, entities, dt, robot_disc);
    world.discs.clear();
    for (const auto & e : entities) {
      world.discs.push_back(e.disc());
    }

    LaserScan scan;
    if (world_to_cell(sc.ground_truth.spec(), truth.position())) {
      scan = simulate_scan(world, truth, cfg.laser_beams, cfg.laser_max_range, cfg.laser_noise_sd,
        &laser_rng);
    } else {
      scan.max_range = cfg.laser_max_range;
      scan.beams.assign(static_cast<std::size_t>(cfg.laser_beams), Beam{0.0, cfg.laser_max_range, false});
    }

    const VelocityCommand cmd = ctl.tick(odom, scan, dt);
    ++tick;
    t = static_cast<double>(tick) * dt;
    if (!ctl.stopped()) {
      const Pose before = truth;
      odom = integrate(odom, cmd, dt);
      truth = integrate(truth, cmd, dt);
      if (cfg.odometry_noise_sd > 0.0) {
        truth.x += odom_rng.normal(0.0, cfg.odometry_noise_sd);
        truth.y += odom_rng.normal(0.0, cfg.odometry_noise_sd);
        truth.theta = normalize_angle(truth.theta + odom_rng.normal(0.0, cfg.odometry_noise_sd));
      }
      summary.path_length += distance(before.position(), truth.position());
      trail.push_back(truth.position());
    }
    measure();
    row(t, truth, ctl.stopped() ? VelocityCommand{} : cmd, ctl.state());

    if (options.render_every > 0 && (tick % options.render_every == 0 || ctl.stopped())) {
      char name[32];
      std::snprintf(name, sizeof(name), "frame_%06ld.ppm", tick);
      result.frames.emplace_back(name, encode_ppm(render_frame(sc, ctl, trail, truth, entities)));
    }
  }

  summary.stop_reason = *ctl.stop_reason();
  summary.reached = summary.stop_reason == StopReason::ReachedGoal;
  summary.sim_time = t;
  summary.replan_count = ctl.replan_count();
  summary.events = ctl.events();

  json s;
  s["scenario"] = sc.name;
  s["seed"] = sc.seed;
  s["reached"] = summary.reached;
  s["stop_reason"] = to_string(summary.stop_reason);
  s["sim_time"] = std::round(summary.sim_time * 1e6) / 1e6;
  s["path_length"] = std::round(summary.path_length * 1e6) / 1e6;
  s["replan_count"] = summary.replan_count;
  s["min_clearance"] = std::round(summary.min_clearance * 1e6) / 1e6;
  s["collision_count"] = summary.collision_count;
  s["event_count"] = summary.events.size();
  result.summary_json = s.dump(2) + "\n";
  result.events_jsonl = events_to_jsonl(summary.events);
  return result;
}

void write_artifacts(const RunResult & result, const std::filesystem::path & out_dir)
{
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw Error(ErrorCode::Io, "cannot create '" + out_dir.string() + "': " + ec.message());
  }
  write_file((out_dir / "trajectory.csv").string(), result.trajectory_csv);
  write_file((out_dir / "events.jsonl").string(), result.events_jsonl);
  write_file((out_dir / "summary.json").string(), result.summary_json);
  for (const auto & [name, bytes] : result.frames) {
    write_file((out_dir / name).string(), bytes);
  }
}

PlanReport plan_once(const OccupancyGrid & map, Vec2 start, Vec2 goal, const NavConfig & cfg)
{
  using clock = std::chrono::steady_clock;
  const auto & spec = map.spec();
  const auto s = world_to_cell(spec, start);
  const auto g = world_to_cell(spec, goal);
  if (!s || !g) {
    throw Error(ErrorCode::OutOfBounds, "start or goal lies off the map");
  }

  const auto t0 = clock::now();
  const CSpaceGrid cspace = inflate(map, cfg.effective_inflation());
  if (cspace.is_blocked(*s)) {
    throw Error(ErrorCode::StartBlocked, "start cell is blocked");
  }
  if (cspace.is_blocked(*g)) {
    throw Error(ErrorCode::GoalBlocked, "goal cell is blocked");
  }
  const auto t1 = clock::now();
  const WavefrontField field = propagate(cspace, *g, cfg.metric);
  PlanReport report;
  report.plan.cells = extract_path(field, *s);
  const auto t2 = clock::now();
  report.plan.steps =
    smooth(*s, compress(report.plan.cells, spec.resolution), cfg.min_step_length, spec.resolution);
  for (const auto & step : report.plan.steps) {
    report.plan.waypoints.push_back(step.end_cell);
  }
  const auto t3 = clock::now();

  using ms = std::chrono::duration<double, std::milli>;
  report.search_ms = ms(t2 - t1).count();
  report.total_ms = ms(t3 - t0).count();
  report.field = field_image(field);
  report.path = path_image(cspace, report.plan);
  return report;
}

}  // namespace wavenav
