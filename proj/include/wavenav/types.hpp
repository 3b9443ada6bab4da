#ifndef WAVENAV_TYPES_HPP_
#define WAVENAV_TYPES_HPP_

#include <cmath>
#include <compare>
#include <numbers>

namespace wavenav
{

struct Vec2
{
  double x{0.0};
  double y{0.0};

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2, Vec2) = default;

  double norm() const { return std::hypot(x, y); }
};

inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// Integer grid cell index. x grows east, y grows north.
struct Cell
{
  int x{0};
  int y{0};

  friend auto operator<=>(const Cell &, const Cell &) = default;
};

/// Wraps an angle into (-pi, pi].
inline double normalize_angle(double a)
{
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) {
    a += two_pi;
  } else if (a > std::numbers::pi) {
    a -= two_pi;
  }
  return a;
}

struct Pose
{
  double x{0.0};
  double y{0.0};
  double theta{0.0};

  Vec2 position() const { return {x, y}; }
  Vec2 heading() const { return {std::cos(theta), std::sin(theta)}; }
};

}  // namespace wavenav

#endif  // WAVENAV_TYPES_HPP_
