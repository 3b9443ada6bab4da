#include "wavenav/grid_map.hpp"

#include <algorithm>
#include <cmath>

#include "wavenav/error.hpp"

namespace wavenav
{

std::optional<Cell> world_to_cell(const GridSpec & spec, Vec2 p)
{
  const double fx = std::floor((p.x - spec.origin.x) / spec.resolution);
  const double fy = std::floor((p.y - spec.origin.y) / spec.resolution);
  if (!(fx >= 0.0 && fy >= 0.0 && fx < spec.width_cells && fy < spec.height_cells)) {
    return std::nullopt;
  }
  return Cell{static_cast<int>(fx), static_cast<int>(fy)};
}

Vec2 cell_to_world(const GridSpec & spec, Cell c)
{
  return {spec.origin.x + (c.x + 0.5) * spec.resolution,
    spec.origin.y + (c.y + 0.5) * spec.resolution};
}

OccupancyGrid::OccupancyGrid(GridSpec spec, std::vector<std::uint8_t> walls,
  double occupancy_threshold)
: spec_(spec),
  walls_(std::move(walls)),
  confidence_(spec.cell_count(), 0.0),
  threshold_(occupancy_threshold)
{
  if (spec_.width_cells < 1 || spec_.height_cells < 1 || !(spec_.resolution > 0.0)) {
    throw Error(ErrorCode::MalformedMap, "grid dimensions and resolution must be positive");
  }
  if (walls_.size() != spec_.cell_count()) {
    throw Error(ErrorCode::MalformedMap, "wall layer size does not match grid dimensions");
  }
  if (!(threshold_ > 0.0)) {
    throw Error(ErrorCode::MalformedMap, "occupancy threshold must be positive");
  }
}

OccupancyGrid OccupancyGrid::empty(GridSpec spec, double occupancy_threshold)
{
  return {spec, std::vector<std::uint8_t>(spec.cell_count(), 0), occupancy_threshold};
}

void OccupancyGrid::add_detection(Cell c)
{
  const auto i = spec_.index(c);
  if (walls_[i] == 0) {
    confidence_[i] = std::min(confidence_[i] + 1.0, confidence_cap());
  }
}

void OccupancyGrid::set_confidence(Cell c, double value)
{
  const auto i = spec_.index(c);
  if (walls_[i] == 0) {
    confidence_[i] = std::clamp(value, 0.0, confidence_cap());
  }
}

void OccupancyGrid::age(double factor)
{
  for (std::size_t i = 0; i < confidence_.size(); ++i) {
    if (walls_[i] == 0 && confidence_[i] > 0.0) {
      confidence_[i] = std::max(0.0, confidence_[i] - factor);
    }
  }
}

std::size_t OccupancyGrid::wall_count() const
{
  return static_cast<std::size_t>(std::count(walls_.begin(), walls_.end(), 1));
}

OccupancyGrid load_map(std::string_view bytes, double resolution, double threshold, Vec2 origin)
{
  if (!(resolution > 0.0)) {
    throw Error(ErrorCode::MalformedMap, "resolution must be positive");
  }
  const GrayImage image = parse_pgm(bytes);
  GridSpec spec{image.width, image.height, resolution, origin};
  std::vector<std::uint8_t> walls(spec.cell_count(), 0);
  for (int row = 0; row < image.height; ++row) {
    const int y = image.height - 1 - row;
    for (int x = 0; x < image.width; ++x) {
      walls[spec.index({x, y})] = image.at(x, row) < 128 ? 1 : 0;
    }
  }
  return {spec, std::move(walls), threshold};
}

std::string encode_map_pgm(const OccupancyGrid & grid)
{
  const auto & spec = grid.spec();
  GrayImage image{spec.width_cells, spec.height_cells,
    std::vector<std::uint8_t>(spec.cell_count(), 255)};
  for (int y = 0; y < spec.height_cells; ++y) {
    for (int x = 0; x < spec.width_cells; ++x) {
      if (grid.is_wall({x, y})) {
        image.at(x, spec.height_cells - 1 - y) = 0;
      }
    }
  }
  return encode_pgm(image);
}

void mark_detections(OccupancyGrid & grid, const Pose & pose, const LaserScan & scan,
  double map_range)
{
  // Ranges end on the boundary of the struck cell; nudge past it so the
  // endpoint is attributed to the obstacle rather than the free cell before it.
  const double push = 1e-3 * grid.spec().resolution;
  for (const auto & beam : scan.beams) {
    if (!beam.hit || beam.range > map_range) {
      continue;
    }
    const double a = pose.theta + beam.bearing;
    const double r = beam.range + push;
    const Vec2 end{pose.x + r * std::cos(a), pose.y + r * std::sin(a)};
    if (const auto cell = world_to_cell(grid.spec(), end)) {
      grid.add_detection(*cell);
    }
  }
}

void clear_footprint(OccupancyGrid & grid, Vec2 center, double radius)
{
  const auto & spec = grid.spec();
  const int reach = static_cast<int>(std::ceil(radius / spec.resolution)) + 1;
  const auto mid = world_to_cell(spec, center);
  if (!mid) {
    return;
  }
  for (int dy = -reach; dy <= reach; ++dy) {
    for (int dx = -reach; dx <= reach; ++dx) {
      const Cell c{mid->x + dx, mid->y + dy};
      if (spec.contains(c) && distance(cell_to_world(spec, c), center) <= radius) {
        grid.set_confidence(c, 0.0);
      }
    }
  }
}

void age_objects(OccupancyGrid & grid, double aging_factor)
{
  grid.age(aging_factor);
}

double wall_clearance(const OccupancyGrid & grid, Vec2 p, double search_radius,
  bool edges_are_walls)
{
  const auto & spec = grid.spec();
  const double res = spec.resolution;
  const double lx = (p.x - spec.origin.x) / res;
  const double ly = (p.y - spec.origin.y) / res;
  const int reach = static_cast<int>(std::ceil(search_radius / res)) + 1;
  const int cx = static_cast<int>(std::floor(lx));
  const int cy = static_cast<int>(std::floor(ly));
  double best = search_radius;
  for (int y = cy - reach; y <= cy + reach; ++y) {
    for (int x = cx - reach; x <= cx + reach; ++x) {
      const Cell c{x, y};
      const bool inside = spec.contains(c);
      if (inside ? !grid.is_wall(c) : !edges_are_walls) {
        continue;
      }
      const double gx = std::max({x - lx, lx - (x + 1), 0.0});
      const double gy = std::max({y - ly, ly - (y + 1), 0.0});
      best = std::min(best, std::hypot(gx, gy) * res);
    }
  }
  return best;
}

CSpaceGrid inflate(const OccupancyGrid & grid, double inflation_radius)
{
  const auto & spec = grid.spec();
  CSpaceGrid out{spec, std::vector<std::uint8_t>(spec.cell_count(), 0)};

  const double r_cells = std::max(0.0, inflation_radius) / spec.resolution;
  const double r2 = r_cells * r_cells * (1.0 + 1e-9);
  const int reach = static_cast<int>(std::floor(r_cells + 1e-9));
  std::vector<Cell> disc;
  for (int dy = -reach; dy <= reach; ++dy) {
    for (int dx = -reach; dx <= reach; ++dx) {
      if (static_cast<double>(dx * dx + dy * dy) <= r2) {
        disc.push_back({dx, dy});
      }
    }
  }

  for (int y = 0; y < spec.height_cells; ++y) {
    for (int x = 0; x < spec.width_cells; ++x) {
      if (!grid.is_occupied({x, y})) {
        continue;
      }
      for (const auto & d : disc) {
        const Cell c{x + d.x, y + d.y};
        if (spec.contains(c)) {
          out.blocked[spec.index(c)] = 1;
        }
      }
    }
  }
  return out;
}

GrayImage confidence_image(const OccupancyGrid & grid)
{
  const auto & spec = grid.spec();
  GrayImage image{spec.width_cells, spec.height_cells,
    std::vector<std::uint8_t>(spec.cell_count(), 255)};
  for (int y = 0; y < spec.height_cells; ++y) {
    for (int x = 0; x < spec.width_cells; ++x) {
      std::uint8_t v = 0;
      if (!grid.is_wall({x, y})) {
        const double c = std::min(grid.confidence({x, y}), grid.threshold());
        v = static_cast<std::uint8_t>(255 - std::lround(254.0 * c / grid.threshold()));
      }
      image.at(x, spec.height_cells - 1 - y) = v;
    }
  }
  return image;
}

std::string encode_confidence_pgm(const OccupancyGrid & grid)
{
  return encode_pgm(confidence_image(grid),
    {"wall=0; object confidence c -> 255-round(254*min(c,threshold)/threshold)",
      "threshold=" + std::to_string(grid.threshold())});
}

}  // namespace wavenav
