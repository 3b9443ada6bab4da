#include "wavenav/wavefront.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wavenav/error.hpp"

namespace wavenav
{

std::string Metric::name() const
{
  if (kind == Kind::Manhattan) {
    return "manhattan";
  }
  return "chamfer:" + std::to_string(w_orth) + "," + std::to_string(w_diag);
}

std::optional<Metric> parse_metric(const std::string & text)
{
  if (text == "manhattan") {
    return Metric::manhattan();
  }
  if (text == "chamfer") {
    return Metric::chamfer();
  }
  const std::string prefix = "chamfer:";
  if (text.rfind(prefix, 0) != 0) {
    return std::nullopt;
  }
  const auto rest = text.substr(prefix.size());
  const auto comma = rest.find(',');
  if (comma == std::string::npos) {
    return std::nullopt;
  }
  try {
    std::size_t used_o = 0;
    std::size_t used_d = 0;
    const auto o_str = rest.substr(0, comma);
    const auto d_str = rest.substr(comma + 1);
    const long o = std::stol(o_str, &used_o);
    const long d = std::stol(d_str, &used_d);
    if (used_o != o_str.size() || used_d != d_str.size() || o < 1 || d < 1 || o > 1000 ||
      d > 1000)
    {
      return std::nullopt;
    }
    return Metric::chamfer(static_cast<std::uint32_t>(o), static_cast<std::uint32_t>(d));
  } catch (const std::exception &) {
    return std::nullopt;
  }
}

Cell offset(Compass d)
{
  switch (d) {
    case Compass::N: return {0, 1};
    case Compass::NE: return {1, 1};
    case Compass::E: return {1, 0};
    case Compass::SE: return {1, -1};
    case Compass::S: return {0, -1};
    case Compass::SW: return {-1, -1};
    case Compass::W: return {-1, 0};
    case Compass::NW: return {-1, 1};
  }
  return {0, 0};
}

bool is_diagonal(Compass d)
{
  const auto o = offset(d);
  return o.x != 0 && o.y != 0;
}

std::optional<Compass> compass_of(Cell delta)
{
  for (const auto d : kClockwise) {
    if (offset(d) == delta) {
      return d;
    }
  }
  return std::nullopt;
}

const char * to_string(Compass d)
{
  static constexpr const char * names[] = {"N", "NE", "E", "SE", "S", "SW", "W", "NW"};
  return names[static_cast<int>(d)];
}

namespace
{

std::span<const Compass> neighborhood(const Metric & metric)
{
  static constexpr std::array<Compass, 4> four{Compass::N, Compass::E, Compass::S, Compass::W};
  if (metric.kind == Metric::Kind::Manhattan) {
    return four;
  }
  return kClockwise;
}

std::uint32_t edge_weight(const Metric & metric, Compass d)
{
  return is_diagonal(d) ? metric.w_diag : metric.w_orth;
}

}  // namespace

WavefrontField::WavefrontField(GridSpec spec, Cell source, Metric metric,
  std::vector<std::uint32_t> values, std::vector<std::uint8_t> blocked)
: spec_(spec), source_(source), metric_(metric), values_(std::move(values)),
  blocked_(std::move(blocked))
{
}

std::uint32_t WavefrontField::max_value() const
{
  std::uint32_t m = 0;
  for (const auto v : values_) {
    if (v != kUnreached) {
      m = std::max(m, v);
    }
  }
  return m;
}

WavefrontField propagate(const CSpaceGrid & cspace, Cell source, Metric metric)
{
  const auto & spec = cspace.spec;
  if (!spec.contains(source)) {
    throw Error(ErrorCode::SourceOutOfBounds, "wavefront source lies off the grid");
  }
  if (cspace.is_blocked(source)) {
    throw Error(ErrorCode::SourceBlocked, "wavefront source is blocked");
  }
  if (metric.w_orth < 1 || metric.w_diag < 1) {
    throw Error(ErrorCode::SchemaError, "metric weights must be >= 1");
  }

  // Dial's bucket queue: edge weights are small integers, so a ring of
  // (max weight + 1) buckets holds every pending wavefront.
  const auto dirs = neighborhood(metric);
  const std::uint32_t max_w = std::max(metric.w_orth, metric.w_diag);
  const std::size_t ring = max_w + 1;
  std::vector<std::vector<std::size_t>> buckets(ring);
  std::vector<std::uint32_t> values(spec.cell_count(), kUnreached);

  const auto src = spec.index(source);
  values[src] = 0;
  buckets[0].push_back(src);
  std::size_t pending = 1;
  std::vector<std::size_t> front;

  for (std::uint64_t cost = 0; pending > 0; ++cost) {
    auto & bucket = buckets[cost % ring];
    front.swap(bucket);
    bucket.clear();
    pending -= front.size();
    for (const auto idx : front) {
      if (values[idx] != cost) {
        continue;  // superseded by a cheaper entry
      }
      const Cell c = spec.cell_at(idx);
      for (const auto d : dirs) {
        const Cell o = offset(d);
        const Cell n{c.x + o.x, c.y + o.y};
        if (!spec.contains(n) || cspace.is_blocked(n)) {
          continue;
        }
        const auto ni = spec.index(n);
        const std::uint64_t next = cost + edge_weight(metric, d);
        if (next < values[ni]) {
          values[ni] = static_cast<std::uint32_t>(next);
          buckets[next % ring].push_back(ni);
          ++pending;
        }
      }
    }
    front.clear();
  }

  return {spec, source, metric, std::move(values), cspace.blocked};
}

std::vector<Cell> extract_path(const WavefrontField & field, Cell start)
{
  const auto & spec = field.spec();
  if (!spec.contains(start)) {
    throw Error(ErrorCode::OutOfBounds, "path start lies off the grid");
  }
  if (field.blocked(start)) {
    throw Error(ErrorCode::StartBlocked, "path start is blocked");
  }
  if (!field.reached(start)) {
    throw Error(ErrorCode::NoPath, "start is not connected to the source");
  }

  const auto dirs = neighborhood(field.metric());
  std::vector<Cell> path{start};
  Cell cur = start;
  std::optional<Compass> previous;

  while (field.value(cur) != 0) {
    const std::uint64_t here = field.value(cur);
    std::optional<Compass> best;
    int best_rank = 3;
    for (const auto d : dirs) {
      const Cell o = offset(d);
      const Cell n{cur.x + o.x, cur.y + o.y};
      if (!spec.contains(n) || !field.reached(n)) {
        continue;
      }
      if (static_cast<std::uint64_t>(field.value(n)) + edge_weight(field.metric(), d) != here) {
        continue;
      }
      const int rank = (previous && *previous == d) ? 0 : (is_diagonal(d) ? 2 : 1);
      if (rank < best_rank) {
        best_rank = rank;
        best = d;
      }
    }
    if (!best) {
      // Unreachable for a field produced by propagate().
      throw Error(ErrorCode::NoPath, "descent stalled");
    }
    const Cell o = offset(*best);
    cur = {cur.x + o.x, cur.y + o.y};
    path.push_back(cur);
    previous = best;
  }
  return path;
}

namespace
{

double lattice_heading(Cell delta)
{
  return std::atan2(static_cast<double>(delta.y), static_cast<double>(delta.x));
}

MotionStep segment(Cell from, Cell to, double resolution)
{
  const Cell delta{to.x - from.x, to.y - from.y};
  return {lattice_heading(delta), std::hypot(delta.x, delta.y) * resolution, to};
}

}  // namespace

std::vector<MotionStep> compress(std::span<const Cell> cells, double resolution)
{
  std::vector<MotionStep> steps;
  if (cells.size() < 2) {
    return steps;
  }
  std::optional<Compass> run_dir;
  int run_len = 0;
  auto flush = [&](Cell end) {
    const double unit = is_diagonal(*run_dir) ? resolution * std::numbers::sqrt2 : resolution;
    steps.push_back({lattice_heading(offset(*run_dir)), run_len * unit, end});
  };
  for (std::size_t i = 1; i < cells.size(); ++i) {
    const Cell delta{cells[i].x - cells[i - 1].x, cells[i].y - cells[i - 1].y};
    const auto dir = compass_of(delta);
    if (!dir) {
      throw Error(ErrorCode::NonAdjacentCells, "consecutive path cells are not 8-neighbors");
    }
    if (run_dir && *run_dir != *dir) {
      flush(cells[i - 1]);
      run_len = 0;
    }
    run_dir = dir;
    ++run_len;
  }
  flush(cells.back());
  return steps;
}

std::vector<MotionStep> smooth(Cell start, std::span<const MotionStep> steps,
  double min_step_length, double resolution)
{
  if (!(min_step_length > 0.0) || steps.empty()) {
    return {steps.begin(), steps.end()};
  }

  struct Seg
  {
    Cell from;
    MotionStep step;
  };
  std::vector<Seg> kept;
  Cell from = start;
  bool dropped = false;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const bool last = i + 1 == steps.size();
    if (!last && steps[i].length < min_step_length) {
      dropped = true;
      continue;
    }
    kept.push_back({from, dropped ? segment(from, steps[i].end_cell, resolution) : steps[i]});
    from = steps[i].end_cell;
    dropped = false;
  }

  // Re-aimed segments can line up with a neighbor; fuse those so consecutive
  // headings stay distinct.
  std::vector<Seg> merged;
  for (const auto & s : kept) {
    if (!merged.empty()) {
      auto & prev = merged.back();
      const Cell a{prev.step.end_cell.x - prev.from.x, prev.step.end_cell.y - prev.from.y};
      const Cell b{s.step.end_cell.x - s.from.x, s.step.end_cell.y - s.from.y};
      const long long cr = static_cast<long long>(a.x) * b.y - static_cast<long long>(a.y) * b.x;
      const long long dt = static_cast<long long>(a.x) * b.x + static_cast<long long>(a.y) * b.y;
      if (cr == 0 && dt > 0) {
        prev.step = segment(prev.from, s.step.end_cell, resolution);
        continue;
      }
    }
    merged.push_back(s);
  }

  std::vector<MotionStep> out;
  out.reserve(merged.size());
  for (const auto & s : merged) {
    out.push_back(s.step);
  }
  return out;
}

double MotionPlan::length() const
{
  double total = 0.0;
  for (const auto & s : steps) {
    total += s.length;
  }
  return total;
}

MotionPlan make_plan(const CSpaceGrid & cspace, Cell start, Cell goal, Metric metric,
  double min_step_length)
{
  const auto & spec = cspace.spec;
  if (!spec.contains(start)) {
    throw Error(ErrorCode::OutOfBounds, "start lies off the grid");
  }
  if (!spec.contains(goal)) {
    throw Error(ErrorCode::OutOfBounds, "goal lies off the grid");
  }
  if (cspace.is_blocked(start)) {
    throw Error(ErrorCode::StartBlocked, "start cell is blocked");
  }
  if (cspace.is_blocked(goal)) {
    throw Error(ErrorCode::GoalBlocked, "goal cell is blocked");
  }

  const auto field = propagate(cspace, goal, metric);
  MotionPlan plan;
  plan.cells = extract_path(field, start);
  const auto raw = compress(plan.cells, spec.resolution);
  plan.steps = smooth(start, raw, min_step_length, spec.resolution);
  for (const auto & s : plan.steps) {
    plan.waypoints.push_back(s.end_cell);
  }
  return plan;
}

GrayImage field_image(const WavefrontField & field)
{
  const auto & spec = field.spec();
  GrayImage image{spec.width_cells, spec.height_cells,
    std::vector<std::uint8_t>(spec.cell_count(), 0)};
  const double top = std::max<std::uint32_t>(1, field.max_value());
  for (int y = 0; y < spec.height_cells; ++y) {
    for (int x = 0; x < spec.width_cells; ++x) {
      if (field.reached({x, y})) {
        const double t = field.value({x, y}) / top;
        image.at(x, spec.height_cells - 1 - y) =
          static_cast<std::uint8_t>(255 - std::lround(215.0 * t));
      }
    }
  }
  return image;
}

GrayImage path_image(const CSpaceGrid & cspace, const MotionPlan & plan)
{
  const auto & spec = cspace.spec;
  GrayImage image{spec.width_cells, spec.height_cells,
    std::vector<std::uint8_t>(spec.cell_count(), 255)};
  auto put = [&](Cell c, std::uint8_t v) { image.at(c.x, spec.height_cells - 1 - c.y) = v; };
  for (int y = 0; y < spec.height_cells; ++y) {
    for (int x = 0; x < spec.width_cells; ++x) {
      if (cspace.is_blocked({x, y})) {
        put({x, y}, 0);
      }
    }
  }
  for (const auto & c : plan.cells) {
    put(c, 128);
  }
  for (const auto & c : plan.waypoints) {
    put(c, 64);
  }
  return image;
}

}  // namespace wavenav
