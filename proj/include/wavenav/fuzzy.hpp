#ifndef WAVENAV_FUZZY_HPP_
#define WAVENAV_FUZZY_HPP_

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wavenav/scan.hpp"
#include "wavenav/types.hpp"

namespace wavenav
{

/// Linguistic terms. Input/output variables use a subset.
enum class Term : int { NM = 0, NS = 1, ZE = 2, PS = 3, PM = 4 };

inline constexpr std::array<Term, 5> kAllTerms{Term::NM, Term::NS, Term::ZE, Term::PS, Term::PM};
inline constexpr std::array<Term, 3> kMagnitudeTerms{Term::ZE, Term::PS, Term::PM};

const char * to_string(Term t);
std::optional<Term> parse_term(const std::string & text);

/// Piecewise-linear membership function.
///
/// Breakpoints have strictly increasing x. Outside the first (last)
/// breakpoint the grade is 0 unless the left (right) shoulder flag is set, in
/// which case the edge grade extends to infinity.
class MembershipFunction
{
public:
  MembershipFunction(std::vector<std::pair<double, double>> points, bool left_shoulder,
    bool right_shoulder);

  /// (a, b, c) with apex at b. a == b makes a left shoulder, b == c a right one.
  static MembershipFunction triangle(double a, double b, double c);

  double operator()(double x) const;
  const std::vector<std::pair<double, double>> & points() const { return points_; }
  bool left_shoulder() const { return left_shoulder_; }
  bool right_shoulder() const { return right_shoulder_; }
  double peak() const;

private:
  std::vector<std::pair<double, double>> points_;
  bool left_shoulder_;
  bool right_shoulder_;
};

using Grades = std::array<double, 5>;  // indexed by Term

struct LinguisticVariable
{
  std::string name;
  double lo{0.0};
  double hi{1.0};
  std::vector<std::pair<Term, MembershipFunction>> terms;

  /// Throws std::invalid_argument unless every term is normal and the
  /// supports jointly cover [lo, hi].
  void validate() const;
};

/// grade_t = mu_t(clamp(x, lo, hi)); terms absent from the variable grade 0.
Grades fuzzify(double x, const LinguisticVariable & var);

/// Triangle breakpoints for the two inputs, overridable from config.
struct MembershipConfig
{
  std::array<std::array<double, 3>, 5> angle{{
    {-1.0, -1.0, -0.5}, {-1.0, -0.5, 0.0}, {-0.5, 0.0, 0.5}, {0.0, 0.5, 1.0}, {0.5, 1.0, 1.0}}};
  // Indexed ZE, PS, PM.
  std::array<std::array<double, 3>, 3> distance{{
    {0.0, 0.0, 0.5}, {0.0, 0.5, 1.0}, {0.5, 1.0, 1.0}}};
};

LinguisticVariable make_angle_variable(const MembershipConfig & cfg);
LinguisticVariable make_distance_variable(const MembershipConfig & cfg);
/// ZE (0,0,v/2), PS (0,v/2,v), PM (v/2,v,v).
LinguisticVariable make_speed_variable(double v_max);
/// Five evenly spaced triangles over [-w, w], shoulders at the ends.
LinguisticVariable make_turn_variable(double omega_max);

/// Waypoint-dependent choice for the angle-ZE column of the turn table.
enum class Side { Left, Right };
const char * to_string(Side s);

/// Turn-table entry: either fixed, or one option per waypoint side.
struct TurnRule
{
  Term if_right;
  Term if_left;

  bool ambiguous() const { return if_right != if_left; }
};

using SpeedTable = std::array<std::array<Term, 5>, 3>;  // [distance ZE/PS/PM][angle NM..PM]
using TurnTable = std::array<std::array<Term, 5>, 3>;

struct RuleBase
{
  SpeedTable speed;
  std::array<std::array<TurnRule, 5>, 3> turn;

  /// Speed and turn-rate rules for the laser avoidance controller.
  static RuleBase standard();
};

/// Row index for a distance term (ZE 0, PS 1, PM 2).
int distance_row(Term t);

TurnTable resolve_turn_table(const RuleBase & rules, Side side);

/// Sign of heading x (waypoint - position); collinear counts as Left.
Side waypoint_side(const Pose & pose, Vec2 waypoint);

/// Pointwise max of clipped output terms over [lo, hi].
struct FuzzySet
{
  double lo{0.0};
  double hi{1.0};
  std::vector<std::pair<MembershipFunction, double>> clipped;  // (term, clip level)

  double operator()(double x) const;
};

/// Centre of area. The aggregate is piecewise linear, so it is split at every
/// breakpoint, clip crossing and term intersection and integrated exactly.
/// Returns `neutral` when the set has zero area.
double coa(const FuzzySet & set, double neutral);

struct AvoidanceCommand
{
  double speed{0.0};      // m/s
  double turn_rate{0.0};  // rad/s, positive = counter-clockwise
  bool engaged{false};
};

struct AvoidanceConfig
{
  double avoidance_range{1.1};  // m
  double v_max{0.3};            // m/s
  double omega_max{1.0};        // rad/s
  MembershipConfig membership{};
};

/// Max-min inference over every beam inside the avoidance range, defuzzified
/// by centre of area.
class FuzzyAvoider
{
public:
  explicit FuzzyAvoider(AvoidanceConfig cfg, RuleBase rules = RuleBase::standard());

  /// Throws Error(EmptyScan) for a scan without beams.
  AvoidanceCommand infer(const LaserScan & scan, const Pose & pose, Vec2 waypoint) const;
  AvoidanceCommand infer(const LaserScan & scan, Side side) const;

  const AvoidanceConfig & config() const { return cfg_; }
  const RuleBase & rules() const { return rules_; }
  const LinguisticVariable & angle() const { return angle_; }
  const LinguisticVariable & distance() const { return distance_; }
  const LinguisticVariable & speed() const { return speed_; }
  const LinguisticVariable & turn() const { return turn_; }

private:
  AvoidanceConfig cfg_;
  RuleBase rules_;
  LinguisticVariable angle_;
  LinguisticVariable distance_;
  LinguisticVariable speed_;
  LinguisticVariable turn_;
};

/// True once avoidance is disengaged or the commanded turn is within epsilon of zero.
bool steering_settled(const AvoidanceCommand & cmd, double epsilon);

/// Human-readable dump of the membership breakpoints and rule tables.
std::string describe_rules(const FuzzyAvoider & avoider);

}  // namespace wavenav

#endif  // WAVENAV_FUZZY_HPP_
