#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "wavenav/error.hpp"
#include "wavenav/fuzzy.hpp"

using namespace wavenav;

namespace
{

constexpr double kHalfPi = std::numbers::pi / 2;

double grade(const Grades & g, Term t)
{
  return g[static_cast<std::size_t>(t)];
}

Term term(const std::string & s)
{
  return *parse_term(s);
}

LaserScan scan_of(std::vector<Beam> beams)
{
  return {std::move(beams), 8.0};
}

LaserScan random_scan(std::mt19937_64 & rng, int n, double max_range)
{
  std::uniform_real_distribution<double> range(0.05, 2.0 * max_range);
  std::bernoulli_distribution hit(0.8);
  LaserScan s;
  s.max_range = 8.0;
  for (int i = 0; i < n; ++i) {
    const double bearing = -kHalfPi + std::numbers::pi * i / (n - 1);
    const bool h = hit(rng);
    s.beams.push_back({bearing, h ? range(rng) : 8.0, h});
  }
  return s;
}

// Reference inference built only from the documented breakpoints, the rule
// tables as printed (columns PM PS ZE NS NM) and brute-force sampling.
struct Tri
{
  double a, b, c;
  double operator()(double x) const
  {
    if (a == b && x <= b) {
      return 1.0;
    }
    if (b == c && x >= b) {
      return 1.0;
    }
    if (x <= a || x >= c) {
      return 0.0;
    }
    return x <= b ? (x - a) / (b - a) : (c - x) / (c - b);
  }
};

struct ReferenceAvoider
{
  double range{1.1};
  double v_max{0.3};
  double w_max{1.0};

  // Columns PM PS ZE NS NM; rows distance ZE PS PM.
  std::array<std::array<const char *, 5>, 3> speed{{
    {"PS", "ZE", "ZE", "ZE", "PS"}, {"PS", "ZE", "ZE", "ZE", "PS"}, {"PM", "PS", "ZE", "PS", "PM"}}};
  std::array<std::array<const char *, 5>, 3> turn_left{{
    {"NS", "NM", "PM", "PM", "PS"}, {"ZE", "NS", "PM", "PS", "ZE"}, {"ZE", "NS", "PS", "PS", "ZE"}}};
  std::array<std::array<const char *, 5>, 3> turn_right{{
    {"NS", "NM", "NM", "PM", "PS"}, {"ZE", "NS", "NM", "PS", "ZE"}, {"ZE", "NS", "NS", "PS", "ZE"}}};

  std::array<Tri, 5> angle_cols{{
    {0.5, 1, 1}, {0, 0.5, 1}, {-0.5, 0, 0.5}, {-1, -0.5, 0}, {-1, -1, -0.5}}};  // PM..NM
  std::array<Tri, 3> dist_rows{{{0, 0, 0.5}, {0, 0.5, 1}, {0.5, 1, 1}}};

  Tri speed_mf(const std::string & t) const
  {
    if (t == "ZE") return {0, 0, v_max / 2};
    if (t == "PS") return {0, v_max / 2, v_max};
    return {v_max / 2, v_max, v_max};
  }
  Tri turn_mf(const std::string & t) const
  {
    const double h = w_max / 2;
    if (t == "NM") return {-w_max, -w_max, -h};
    if (t == "NS") return {-w_max, -h, 0};
    if (t == "ZE") return {-h, 0, h};
    if (t == "PS") return {0, h, w_max};
    return {h, w_max, w_max};
  }

  AvoidanceCommand infer(const LaserScan & scan, Side side, int samples) const
  {
    std::vector<std::pair<Tri, double>> sp;
    std::vector<std::pair<Tri, double>> tr;
    const auto & tt = side == Side::Left ? turn_left : turn_right;
    bool engaged = false;
    for (const auto & b : scan.beams) {
      if (!b.hit || b.range > range) {
        continue;
      }
      engaged = true;
      const double a = std::clamp(b.bearing / kHalfPi, -1.0, 1.0);
      const double d = std::clamp(b.range / range, 0.0, 1.0);
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 5; ++c) {
          const double s = std::min(dist_rows[r](d), angle_cols[c](a));
          if (s > 0) {
            sp.push_back({speed_mf(speed[r][c]), s});
            tr.push_back({turn_mf(tt[r][c]), s});
          }
        }
      }
    }
    if (!engaged) {
      return {v_max, 0.0, false};
    }
    auto coa = [&](const std::vector<std::pair<Tri, double>> & set, double lo, double hi) {
      double num = 0;
      double den = 0;
      const double h = (hi - lo) / (samples - 1);
      for (int i = 0; i < samples; ++i) {
        const double x = lo + h * i;
        double mu = 0;
        for (const auto & [mf, lvl] : set) {
          mu = std::max(mu, std::min(lvl, mf(x)));
        }
        const double w = (i == 0 || i == samples - 1) ? 0.5 : 1.0;
        num += w * x * mu;
        den += w * mu;
      }
      return num / den;
    };
    return {coa(sp, 0, v_max), coa(tr, -w_max, w_max), true};
  }
};

}  // namespace

TEST(Fuzzify, AngleExamples)
{
  const auto angle = make_angle_variable({});
  auto g = fuzzify(0.0, angle);
  EXPECT_EQ(grade(g, Term::ZE), 1.0);
  EXPECT_EQ(grade(g, Term::NS), 0.0);
  EXPECT_EQ(grade(g, Term::PS), 0.0);
  g = fuzzify(-1.0, angle);
  EXPECT_EQ(grade(g, Term::NM), 1.0);
  g = fuzzify(0.25, angle);
  EXPECT_DOUBLE_EQ(grade(g, Term::ZE), 0.5);
  EXPECT_DOUBLE_EQ(grade(g, Term::PS), 0.5);
  EXPECT_EQ(grade(g, Term::PM), 0.0);
  // Inputs beyond the domain are clamped.
  EXPECT_EQ(grade(fuzzify(3.0, angle), Term::PM), 1.0);
  EXPECT_EQ(grade(fuzzify(-7.0, angle), Term::NM), 1.0);
}

TEST(Fuzzify, DistanceExamples)
{
  const auto dist = make_distance_variable({});
  auto g = fuzzify(0.0, dist);
  EXPECT_EQ(grade(g, Term::ZE), 1.0);
  g = fuzzify(0.75, dist);
  EXPECT_DOUBLE_EQ(grade(g, Term::PS), 0.5);
  EXPECT_DOUBLE_EQ(grade(g, Term::PM), 0.5);
  EXPECT_EQ(grade(g, Term::NM), 0.0);  // not a distance term
  EXPECT_EQ(grade(fuzzify(1.0, dist), Term::PM), 1.0);
}

TEST(MembershipFunction, TriangleAndShoulders)
{
  const auto t = MembershipFunction::triangle(0.0, 1.0, 3.0);
  EXPECT_EQ(t(-1.0), 0.0);
  EXPECT_DOUBLE_EQ(t(0.5), 0.5);
  EXPECT_EQ(t(1.0), 1.0);
  EXPECT_DOUBLE_EQ(t(2.5), 0.25);
  EXPECT_EQ(t(3.5), 0.0);
  const auto left = MembershipFunction::triangle(-1.0, -1.0, 0.0);
  EXPECT_EQ(left(-5.0), 1.0);
  EXPECT_DOUBLE_EQ(left(-0.5), 0.5);
  const auto right = MembershipFunction::triangle(0.0, 1.0, 1.0);
  EXPECT_EQ(right(9.0), 1.0);
  EXPECT_EQ(t.peak(), 1.0);
}

TEST(MembershipFunction, RejectsBadBreakpoints)
{
  EXPECT_THROW(MembershipFunction::triangle(1.0, 0.0, 2.0), std::invalid_argument);
  EXPECT_THROW(MembershipFunction::triangle(1.0, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(MembershipFunction({{0.0, 0.0}, {0.0, 1.0}}, false, false), std::invalid_argument);
  EXPECT_THROW(MembershipFunction({{0.0, 0.0}, {1.0, 1.5}}, false, false), std::invalid_argument);
  EXPECT_THROW(MembershipFunction({}, false, false), std::invalid_argument);
}

TEST(LinguisticVariable, DefaultsAreNormalAndCovering)
{
  const FuzzyAvoider avoider(AvoidanceConfig{});
  for (const auto * var : {&avoider.angle(), &avoider.distance(), &avoider.speed(), &avoider.turn()}) {
    EXPECT_NO_THROW(var->validate());
    for (const auto & [t, mf] : var->terms) {
      EXPECT_EQ(mf.peak(), 1.0) << var->name << "." << to_string(t);
      for (int i = 0; i <= 200; ++i) {
        const double x = var->lo + (var->hi - var->lo) * i / 200.0;
        EXPECT_GE(mf(x), 0.0);
        EXPECT_LE(mf(x), 1.0);
      }
    }
  }
}

TEST(LinguisticVariable, RejectsGapsAndSubnormalTerms)
{
  MembershipConfig gap;
  gap.distance = {{{0.0, 0.0, 0.3}, {0.4, 0.5, 0.6}, {0.7, 1.0, 1.0}}};
  EXPECT_THROW(FuzzyAvoider(AvoidanceConfig{1.1, 0.3, 1.0, gap}), std::invalid_argument);

  LinguisticVariable v{"v", 0.0, 1.0, {}};
  v.terms.emplace_back(Term::ZE, MembershipFunction({{0.0, 0.5}, {1.0, 0.5}}, true, true));
  EXPECT_THROW(v.validate(), std::invalid_argument);
}

TEST(WaypointSide, Examples)
{
  const Pose east{0.0, 0.0, 0.0};
  EXPECT_EQ(waypoint_side(east, {1.0, 1.0}), Side::Left);
  EXPECT_EQ(waypoint_side(east, {1.0, -1.0}), Side::Right);
  EXPECT_EQ(waypoint_side(east, {3.0, 0.0}), Side::Left);
  const Pose north{2.0, 2.0, kHalfPi};
  EXPECT_EQ(waypoint_side(north, {1.0, 3.0}), Side::Left);
  EXPECT_EQ(waypoint_side(north, {3.0, 3.0}), Side::Right);
}

TEST(TurnTable, ResolutionExamples)
{
  const auto rules = RuleBase::standard();
  const auto left = resolve_turn_table(rules, Side::Left);
  const auto right = resolve_turn_table(rules, Side::Right);
  const auto ze = static_cast<std::size_t>(Term::ZE);
  EXPECT_EQ(left[0][ze], Term::PM);
  EXPECT_EQ(right[2][ze], Term::NS);
  const auto ps = static_cast<std::size_t>(Term::PS);
  EXPECT_EQ(left[0][ps], Term::NM);
  EXPECT_EQ(right[0][ps], Term::NM);
}

// The rule tables cell by cell, transcribed in printed column order.
TEST(RuleTables, MatchPrintedTablesVerbatim)
{
  const std::array<const char *, 5> cols{"PM", "PS", "ZE", "NS", "NM"};
  const std::array<const char *, 3> rows{"ZE", "PS", "PM"};
  const ReferenceAvoider ref;
  const auto rules = RuleBase::standard();
  const auto left = resolve_turn_table(rules, Side::Left);
  const auto right = resolve_turn_table(rules, Side::Right);
  for (std::size_t r = 0; r < 3; ++r) {
    ASSERT_EQ(distance_row(term(rows[r])), static_cast<int>(r));
    for (std::size_t c = 0; c < 5; ++c) {
      const auto a = static_cast<std::size_t>(term(cols[c]));
      EXPECT_EQ(rules.speed[r][a], term(ref.speed[r][c])) << rows[r] << "/" << cols[c];
      EXPECT_EQ(left[r][a], term(ref.turn_left[r][c])) << rows[r] << "/" << cols[c];
      EXPECT_EQ(right[r][a], term(ref.turn_right[r][c])) << rows[r] << "/" << cols[c];
      // Only the angle-ZE column depends on the waypoint.
      EXPECT_EQ(rules.turn[r][a].ambiguous(), std::string(cols[c]) == "ZE");
    }
  }
}

TEST(Coa, SymmetricTriangleAndRectangle)
{
  FuzzySet tri{0.0, 10.0, {{MembershipFunction::triangle(2.0, 3.5, 5.0), 1.0}}};
  EXPECT_NEAR(coa(tri, -1.0), 3.5, 1e-12);
  tri.clipped[0].second = 0.4;
  EXPECT_NEAR(coa(tri, -1.0), 3.5, 1e-12);

  // A plateau spanning the whole domain.
  FuzzySet rect{2.0, 6.0, {{MembershipFunction({{0.0, 1.0}}, true, true), 0.7}}};
  EXPECT_NEAR(coa(rect, -1.0), 4.0, 1e-12);
}

TEST(Coa, ZeroAreaGivesNeutral)
{
  FuzzySet empty{-1.0, 1.0, {}};
  EXPECT_EQ(coa(empty, 0.0), 0.0);
  FuzzySet outside{0.0, 0.3, {{MembershipFunction::triangle(1.0, 2.0, 3.0), 1.0}}};
  EXPECT_EQ(coa(outside, 0.3), 0.3);
}

TEST(CoaProperty, MatchesFineTrapezoid)
{
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double lo = -2.0 + u(rng);
    const double hi = lo + 0.5 + 3.0 * u(rng);
    FuzzySet set{lo, hi, {}};
    const int n = 1 + static_cast<int>(u(rng) * 5);
    for (int k = 0; k < n; ++k) {
      double p[3] = {lo + (hi - lo) * u(rng), lo + (hi - lo) * u(rng), lo + (hi - lo) * u(rng)};
      std::sort(p, p + 3);
      if (p[2] - p[0] < 1e-3) {
        continue;
      }
      set.clipped.emplace_back(MembershipFunction::triangle(p[0], p[1], p[2]), 0.05 + 0.95 * u(rng));
    }
    if (set.clipped.empty()) {
      continue;
    }
    const double exact = coa(set, 0.0);
    const double ref = oracle::trapezoid_coa(set, 0.0, 200001);
    EXPECT_NEAR(exact, ref, 1e-7 * (hi - lo)) << "trial " << trial;
  }
}

TEST(SteeringSettled, Examples)
{
  const double eps = 0.05;
  EXPECT_TRUE(steering_settled({0.2, 0.0, true}, eps));
  EXPECT_TRUE(steering_settled({0.2, eps / 2, true}, eps));
  EXPECT_TRUE(steering_settled({0.2, -eps / 2, true}, eps));
  EXPECT_FALSE(steering_settled({0.2, 2 * eps, true}, eps));
  EXPECT_TRUE(steering_settled({0.2, 2 * eps, false}, eps));
}

TEST(Infer, NothingInRangeDisengages)
{
  const FuzzyAvoider avoider(AvoidanceConfig{});
  const auto cmd = avoider.infer(scan_of({{0.0, 1.2, true}, {0.5, 8.0, false}, {-0.5, 0.3, false}}),
    Side::Left);
  EXPECT_FALSE(cmd.engaged);
  EXPECT_EQ(cmd.turn_rate, 0.0);
  EXPECT_EQ(cmd.speed, 0.3);
}

TEST(Infer, BeamAtRangeLimitCounts)
{
  const FuzzyAvoider avoider(AvoidanceConfig{});
  EXPECT_TRUE(avoider.infer(scan_of({{0.3, 1.1, true}}), Side::Left).engaged);
}

TEST(Infer, ObstacleOnTheRightTurnsLeft)
{
  const FuzzyAvoider avoider(AvoidanceConfig{});
  for (const Side side : {Side::Left, Side::Right}) {
    const auto cmd = avoider.infer(scan_of({{-std::numbers::pi / 4, 0.3, true}}), side);
    EXPECT_TRUE(cmd.engaged);
    EXPECT_GT(cmd.turn_rate, 0.0);
    const auto mirrored = avoider.infer(scan_of({{std::numbers::pi / 4, 0.3, true}}), side);
    EXPECT_LT(mirrored.turn_rate, 0.0);
  }
}

TEST(Infer, FrontalObstacleFollowsWaypointSide)
{
  const FuzzyAvoider avoider(AvoidanceConfig{});
  const auto scan = scan_of({{0.0, 0.4, true}});
  EXPECT_GT(avoider.infer(scan, Side::Left).turn_rate, 0.0);
  EXPECT_LT(avoider.infer(scan, Side::Right).turn_rate, 0.0);
  EXPECT_GT(avoider.infer(scan, Pose{0, 0, 0}, {1.0, 0.5}).turn_rate, 0.0);
  EXPECT_LT(avoider.infer(scan, Pose{0, 0, 0}, {1.0, -0.5}).turn_rate, 0.0);
}

TEST(Infer, TwinObstaclesMatchReference)
{
  const FuzzyAvoider avoider(AvoidanceConfig{});
  const ReferenceAvoider ref;
  const auto scan = scan_of({{-std::numbers::pi / 4, 0.5, true}, {std::numbers::pi / 4, 0.5, true}});
  const auto got = avoider.infer(scan, Side::Left);
  const auto want = ref.infer(scan, Side::Left, 200001);
  EXPECT_GT(got.turn_rate, 0.0);
  EXPECT_NEAR(got.turn_rate, want.turn_rate, 1e-6);
  EXPECT_NEAR(got.speed, want.speed, 1e-6);
}

TEST(InferProperty, MatchesReferenceOnRandomScans)
{
  std::mt19937_64 rng(2718);
  const FuzzyAvoider avoider(AvoidanceConfig{});
  const ReferenceAvoider ref;
  for (int trial = 0; trial < 25; ++trial) {
    const auto scan = random_scan(rng, 19, 1.1);
    const Side side = trial % 2 == 0 ? Side::Left : Side::Right;
    const auto got = avoider.infer(scan, side);
    const auto want = ref.infer(scan, side, 40001);
    EXPECT_EQ(got.engaged, want.engaged);
    EXPECT_NEAR(got.turn_rate, want.turn_rate, 1e-5) << trial;
    EXPECT_NEAR(got.speed, want.speed, 1e-5) << trial;
  }
}

TEST(Infer, EmptyScanThrows)
{
  const FuzzyAvoider avoider(AvoidanceConfig{});
  try {
    avoider.infer(LaserScan{{}, 8.0}, Side::Left);
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyScan);
  }
}

TEST(InferProperty, OutputBounds)
{
  std::mt19937_64 rng(11);
  for (const double v : {0.2, 0.3}) {
    for (const double w : {0.5, 1.0, 2.0}) {
      const FuzzyAvoider avoider(AvoidanceConfig{1.1, v, w, {}});
      for (int trial = 0; trial < 100; ++trial) {
        const auto cmd = avoider.infer(random_scan(rng, 37, 1.1), trial % 2 ? Side::Left : Side::Right);
        EXPECT_GE(cmd.speed, 0.0);
        EXPECT_LE(cmd.speed, v);
        EXPECT_GE(cmd.turn_rate, -w);
        EXPECT_LE(cmd.turn_rate, w);
      }
    }
  }
}

TEST(InferProperty, MirrorAntisymmetry)
{
  std::mt19937_64 rng(23);
  const FuzzyAvoider avoider(AvoidanceConfig{});
  for (int trial = 0; trial < 100; ++trial) {
    const auto scan = random_scan(rng, 61, 1.1);
    LaserScan mirrored = scan;
    const std::size_t n = scan.beams.size();
    for (std::size_t i = 0; i < n; ++i) {
      mirrored.beams[i] = scan.beams[n - 1 - i];
      mirrored.beams[i].bearing = -scan.beams[n - 1 - i].bearing;
    }
    const Side side = trial % 2 ? Side::Left : Side::Right;
    const Side other = side == Side::Left ? Side::Right : Side::Left;
    const auto a = avoider.infer(scan, side);
    const auto b = avoider.infer(mirrored, other);
    EXPECT_NEAR(a.turn_rate, -b.turn_rate, 1e-9);
    EXPECT_EQ(a.speed, b.speed);
  }
}

TEST(InferProperty, AddingABeamNeverDisengages)
{
  std::mt19937_64 rng(5);
  const FuzzyAvoider avoider(AvoidanceConfig{});
  std::uniform_real_distribution<double> bearing(-kHalfPi, kHalfPi);
  std::uniform_real_distribution<double> range(0.01, 1.1);
  for (int trial = 0; trial < 100; ++trial) {
    auto scan = random_scan(rng, 9, 1.1);
    const bool before = avoider.infer(scan, Side::Left).engaged;
    scan.beams.push_back({bearing(rng), range(rng), true});
    const bool after = avoider.infer(scan, Side::Left).engaged;
    EXPECT_TRUE(after);
    EXPECT_TRUE(!before || after);
  }
}

TEST(DescribeRules, ListsTables)
{
  const auto text = describe_rules(FuzzyAvoider(AvoidanceConfig{}));
  EXPECT_NE(text.find("speed rules"), std::string::npos);
  EXPECT_NE(text.find("turn-rate rules, waypoint Left"), std::string::npos);
  EXPECT_NE(text.find("turn-rate rules, waypoint Right"), std::string::npos);
}
