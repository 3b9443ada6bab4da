#ifndef WAVENAV_WAVEFRONT_HPP_
#define WAVENAV_WAVEFRONT_HPP_

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wavenav/grid_map.hpp"
#include "wavenav/types.hpp"

namespace wavenav
{

/// Cell-to-cell cost model for propagation.
///
/// Manhattan expands the 4-neighborhood at unit cost. Chamfer expands the
/// 8-neighborhood with separate orthogonal and diagonal increments; (1,1)
/// gives chessboard rings, (2,3) approximates Euclidean distance.
struct Metric
{
  enum class Kind { Manhattan, Chamfer };

  Kind kind{Kind::Chamfer};
  std::uint32_t w_orth{1};
  std::uint32_t w_diag{1};

  static Metric manhattan() { return {Kind::Manhattan, 1, 1}; }
  static Metric chamfer(std::uint32_t orth = 1, std::uint32_t diag = 1)
  {
    return {Kind::Chamfer, orth, diag};
  }

  std::string name() const;
  friend bool operator==(const Metric &, const Metric &) = default;
};

/// Parses "manhattan", "chamfer" (1,1) or "chamfer:<orth>,<diag>".
std::optional<Metric> parse_metric(const std::string & text);

/// The eight lattice directions, in clockwise order starting at north.
enum class Compass : std::uint8_t { N, NE, E, SE, S, SW, W, NW };

inline constexpr std::array<Compass, 8> kClockwise{
  Compass::N, Compass::NE, Compass::E, Compass::SE,
  Compass::S, Compass::SW, Compass::W, Compass::NW};

Cell offset(Compass d);
bool is_diagonal(Compass d);
/// Direction of a unit lattice move, or nullopt if `delta` is not one.
std::optional<Compass> compass_of(Cell delta);
const char * to_string(Compass d);

inline constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();

/// Single-source shortest distances over the free cells of a c-space grid.
class WavefrontField
{
public:
  WavefrontField(GridSpec spec, Cell source, Metric metric, std::vector<std::uint32_t> values,
    std::vector<std::uint8_t> blocked);

  const GridSpec & spec() const { return spec_; }
  Cell source() const { return source_; }
  const Metric & metric() const { return metric_; }

  std::uint32_t value(Cell c) const { return values_[spec_.index(c)]; }
  bool reached(Cell c) const { return value(c) != kUnreached; }
  bool blocked(Cell c) const { return blocked_[spec_.index(c)] != 0; }
  std::span<const std::uint32_t> values() const { return values_; }
  std::uint32_t max_value() const;

private:
  GridSpec spec_;
  Cell source_;
  Metric metric_;
  std::vector<std::uint32_t> values_;
  std::vector<std::uint8_t> blocked_;
};

/// Expands wavefronts from `source`. Throws SourceOutOfBounds / SourceBlocked.
WavefrontField propagate(const CSpaceGrid & cspace, Cell source, Metric metric);

/// Steepest descent from `start` to the field source, oriented start -> source.
///
/// Each move follows an edge that is tight under the metric (neighbor value
/// plus edge weight equals the current value), so the accumulated edge cost
/// equals value(start). Ties go to the previous heading, then to orthogonal
/// moves, then clockwise from north.
std::vector<Cell> extract_path(const WavefrontField & field, Cell start);

/// A straight motion segment. Headings from compress() are multiples of 45
/// degrees; smoothing may produce arbitrary headings.
struct MotionStep
{
  double heading{0.0};  // rad, world frame
  double length{0.0};   // m
  Cell end_cell{};
};

/// Groups maximal runs of identical lattice direction into single steps.
std::vector<MotionStep> compress(std::span<const Cell> cells, double resolution);

/// Drops steps shorter than `min_step_length` and re-aims the surviving
/// segments so each runs straight between consecutive surviving endpoints.
/// The final endpoint is always kept.
std::vector<MotionStep> smooth(Cell start, std::span<const MotionStep> steps,
  double min_step_length, double resolution);

struct MotionPlan
{
  std::vector<Cell> cells;
  std::vector<MotionStep> steps;
  std::vector<Cell> waypoints;  // end cell of each step

  double length() const;
};

/// propagate (from goal) + extract (from start) + compress + smooth.
/// Throws StartBlocked, GoalBlocked, NoPath, OutOfBounds.
MotionPlan make_plan(const CSpaceGrid & cspace, Cell start, Cell goal, Metric metric,
  double min_step_length);

/// Reached cells shaded by cost (near = light); blocked and unreached cells black.
GrayImage field_image(const WavefrontField & field);
/// Free 255, blocked 0, path cells 128, waypoints 64.
GrayImage path_image(const CSpaceGrid & cspace, const MotionPlan & plan);

}  // namespace wavenav

#endif  // WAVENAV_WAVEFRONT_HPP_
