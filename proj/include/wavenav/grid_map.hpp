#ifndef WAVENAV_GRID_MAP_HPP_
#define WAVENAV_GRID_MAP_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wavenav/raster.hpp"
#include "wavenav/scan.hpp"
#include "wavenav/types.hpp"

namespace wavenav
{

/// Geometry of a fixed-size grid. Cell (0,0) has its lower-left corner at `origin`.
struct GridSpec
{
  int width_cells{1};
  int height_cells{1};
  double resolution{1.0};  // m per cell
  Vec2 origin{};

  bool contains(Cell c) const
  {
    return c.x >= 0 && c.y >= 0 && c.x < width_cells && c.y < height_cells;
  }
  std::size_t index(Cell c) const
  {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_cells) +
           static_cast<std::size_t>(c.x);
  }
  Cell cell_at(std::size_t index) const
  {
    return {static_cast<int>(index % static_cast<std::size_t>(width_cells)),
      static_cast<int>(index / static_cast<std::size_t>(width_cells))};
  }
  std::size_t cell_count() const
  {
    return static_cast<std::size_t>(width_cells) * static_cast<std::size_t>(height_cells);
  }
  Vec2 extent() const { return {width_cells * resolution, height_cells * resolution}; }

  friend bool operator==(const GridSpec &, const GridSpec &) = default;
};

/// floor((p - origin) / resolution), or nullopt when p lies off the map.
std::optional<Cell> world_to_cell(const GridSpec & spec, Vec2 p);
/// Center of the cell in world coordinates.
Vec2 cell_to_world(const GridSpec & spec, Cell c);

/// Static walls from the provided map plus evidence-counted objects.
///
/// Wall flags are fixed at construction. Object confidence lives in
/// [0, 4 * threshold] and a cell is object-occupied once its confidence
/// reaches the threshold. Wall cells never accumulate confidence.
class OccupancyGrid
{
public:
  OccupancyGrid(GridSpec spec, std::vector<std::uint8_t> walls, double occupancy_threshold);

  static OccupancyGrid empty(GridSpec spec, double occupancy_threshold = 7.0);

  const GridSpec & spec() const { return spec_; }
  double threshold() const { return threshold_; }
  double confidence_cap() const { return 4.0 * threshold_; }

  bool is_wall(Cell c) const { return walls_[spec_.index(c)] != 0; }
  double confidence(Cell c) const { return confidence_[spec_.index(c)]; }
  bool is_object(Cell c) const { return confidence_[spec_.index(c)] >= threshold_; }
  bool is_occupied(Cell c) const { return is_wall(c) || is_object(c); }

  /// +1 evidence, saturating at the cap. No-op on walls.
  void add_detection(Cell c);
  /// Clamped to [0, cap]. No-op on walls.
  void set_confidence(Cell c, double value);
  /// Subtracts `factor` from every non-wall cell, clamping at zero.
  void age(double factor);

  std::size_t wall_count() const;

private:
  GridSpec spec_;
  std::vector<std::uint8_t> walls_;
  std::vector<double> confidence_;
  double threshold_;
};

/// Decodes a PGM map. Pixels darker than 128 become walls; image row 0 is the
/// northern edge of the map.
OccupancyGrid load_map(std::string_view bytes, double resolution, double threshold,
  Vec2 origin = {});

/// Encodes the wall layer as a PGM (wall = 0, free = 255), inverse of load_map.
std::string encode_map_pgm(const OccupancyGrid & grid);

/// Increments the endpoint cell of every hit beam whose range is within map_range.
/// Endpoints that leave the map are skipped.
void mark_detections(OccupancyGrid & grid, const Pose & pose, const LaserScan & scan,
  double map_range);

/// Zeroes object confidence in every non-wall cell whose center lies within
/// `radius` of `center` (space the robot body currently fills).
void clear_footprint(OccupancyGrid & grid, Vec2 center, double radius);

/// One ageing pass (see OccupancyGrid::age).
void age_objects(OccupancyGrid & grid, double aging_factor);

/// Distance from p to the nearest wall cell (cell squares, not centers),
/// searching within `search_radius`. Returns search_radius when none is closer.
/// Cells off the map count as walls when `edges_are_walls` is set.
double wall_clearance(const OccupancyGrid & grid, Vec2 p, double search_radius,
  bool edges_are_walls = false);

/// Configuration-space grid: obstacles dilated by a disc.
struct CSpaceGrid
{
  GridSpec spec;
  std::vector<std::uint8_t> blocked;

  bool is_blocked(Cell c) const { return blocked[spec.index(c)] != 0; }
};

/// A cell is blocked iff a wall or object-occupied cell lies within
/// `inflation_radius` (center-to-center, inclusive) of it.
CSpaceGrid inflate(const OccupancyGrid & grid, double inflation_radius);

/// Grayscale rendering of the grid: walls 0; object confidence c maps to
/// 255 - round(254 * min(c, threshold) / threshold).
GrayImage confidence_image(const OccupancyGrid & grid);
std::string encode_confidence_pgm(const OccupancyGrid & grid);

}  // namespace wavenav

#endif  // WAVENAV_GRID_MAP_HPP_
