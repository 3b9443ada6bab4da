#include "wavenav/fuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "wavenav/error.hpp"

namespace wavenav
{

const char * to_string(Term t)
{
  static constexpr const char * names[] = {"NM", "NS", "ZE", "PS", "PM"};
  return names[static_cast<int>(t)];
}

std::optional<Term> parse_term(const std::string & text)
{
  for (const auto t : kAllTerms) {
    if (text == to_string(t)) {
      return t;
    }
  }
  return std::nullopt;
}

const char * to_string(Side s)
{
  return s == Side::Left ? "Left" : "Right";
}

MembershipFunction::MembershipFunction(std::vector<std::pair<double, double>> points,
  bool left_shoulder, bool right_shoulder)
: points_(std::move(points)), left_shoulder_(left_shoulder), right_shoulder_(right_shoulder)
{
  if (points_.empty()) {
    throw std::invalid_argument("membership function needs at least one breakpoint");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto [x, g] = points_[i];
    if (!(g >= 0.0 && g <= 1.0)) {
      throw std::invalid_argument("membership grade outside [0, 1]");
    }
    if (i > 0 && !(x > points_[i - 1].first)) {
      throw std::invalid_argument("membership breakpoints must be strictly increasing");
    }
  }
}

MembershipFunction MembershipFunction::triangle(double a, double b, double c)
{
  if (!(a <= b && b <= c) || a == c) {
    throw std::invalid_argument("triangle needs a <= b <= c with a < c");
  }
  if (a == b) {
    return {{{b, 1.0}, {c, 0.0}}, true, false};
  }
  if (b == c) {
    return {{{a, 0.0}, {b, 1.0}}, false, true};
  }
  return {{{a, 0.0}, {b, 1.0}, {c, 0.0}}, false, false};
}

double MembershipFunction::operator()(double x) const
{
  if (x <= points_.front().first) {
    if (x == points_.front().first || left_shoulder_) {
      return points_.front().second;
    }
    return 0.0;
  }
  if (x >= points_.back().first) {
    if (x == points_.back().first || right_shoulder_) {
      return points_.back().second;
    }
    return 0.0;
  }
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (x > points_[i].first) {
      continue;
    }
    auto lo = points_[i - 1];
    auto hi = points_[i];
    if (lo.second == hi.second) {
      return lo.second;
    }
    // Interpolate from the lower-grade end. Mirrored breakpoints then give
    // bitwise-identical grades for mirrored inputs.
    if (lo.second > hi.second) {
      std::swap(lo, hi);
    }
    return lo.second + (hi.second - lo.second) * ((x - lo.first) / (hi.first - lo.first));
  }
  return 0.0;
}

double MembershipFunction::peak() const
{
  double m = 0.0;
  for (const auto & p : points_) {
    m = std::max(m, p.second);
  }
  return m;
}

void LinguisticVariable::validate() const
{
  if (!(lo < hi)) {
    throw std::invalid_argument(name + ": empty domain");
  }
  if (terms.empty()) {
    throw std::invalid_argument(name + ": no terms");
  }
  for (const auto & [term, mf] : terms) {
    if (mf.peak() != 1.0) {
      throw std::invalid_argument(name + "." + to_string(term) + " is not normal");
    }
  }
  std::vector<double> probes;
  constexpr int samples = 1000;
  for (int i = 0; i <= samples; ++i) {
    probes.push_back(lo + (hi - lo) * i / samples);
  }
  for (const auto & [term, mf] : terms) {
    for (const auto & p : mf.points()) {
      if (p.first >= lo && p.first <= hi) {
        probes.push_back(p.first);
      }
    }
  }
  for (const double x : probes) {
    const auto g = fuzzify(x, *this);
    if (*std::max_element(g.begin(), g.end()) <= 0.0) {
      throw std::invalid_argument(name + ": terms leave a gap in the domain");
    }
  }
}

Grades fuzzify(double x, const LinguisticVariable & var)
{
  Grades g{};
  const double xc = std::clamp(x, var.lo, var.hi);
  for (const auto & [term, mf] : var.terms) {
    g[static_cast<int>(term)] = mf(xc);
  }
  return g;
}

LinguisticVariable make_angle_variable(const MembershipConfig & cfg)
{
  LinguisticVariable v{"angle", -1.0, 1.0, {}};
  for (const auto t : kAllTerms) {
    const auto & p = cfg.angle[static_cast<int>(t)];
    v.terms.emplace_back(t, MembershipFunction::triangle(p[0], p[1], p[2]));
  }
  return v;
}

LinguisticVariable make_distance_variable(const MembershipConfig & cfg)
{
  LinguisticVariable v{"distance", 0.0, 1.0, {}};
  for (std::size_t i = 0; i < kMagnitudeTerms.size(); ++i) {
    const auto & p = cfg.distance[i];
    v.terms.emplace_back(kMagnitudeTerms[i], MembershipFunction::triangle(p[0], p[1], p[2]));
  }
  return v;
}

LinguisticVariable make_speed_variable(double v_max)
{
  LinguisticVariable v{"speed", 0.0, v_max, {}};
  v.terms.emplace_back(Term::ZE, MembershipFunction::triangle(0.0, 0.0, v_max / 2));
  v.terms.emplace_back(Term::PS, MembershipFunction::triangle(0.0, v_max / 2, v_max));
  v.terms.emplace_back(Term::PM, MembershipFunction::triangle(v_max / 2, v_max, v_max));
  return v;
}

LinguisticVariable make_turn_variable(double omega_max)
{
  const double w = omega_max;
  const double h = omega_max / 2;
  LinguisticVariable v{"turn_rate", -w, w, {}};
  v.terms.emplace_back(Term::NM, MembershipFunction::triangle(-w, -w, -h));
  v.terms.emplace_back(Term::NS, MembershipFunction::triangle(-w, -h, 0.0));
  v.terms.emplace_back(Term::ZE, MembershipFunction::triangle(-h, 0.0, h));
  v.terms.emplace_back(Term::PS, MembershipFunction::triangle(0.0, h, w));
  v.terms.emplace_back(Term::PM, MembershipFunction::triangle(h, w, w));
  return v;
}

RuleBase RuleBase::standard()
{
  using enum Term;
  RuleBase r{};
  // Columns: obstacle angle NM NS ZE PS PM. Rows: obstacle distance ZE PS PM.
  r.speed = {{
    {PS, ZE, ZE, ZE, PS},
    {PS, ZE, ZE, ZE, PS},
    {PM, PS, ZE, PS, PM},
  }};
  auto fixed = [](Term t) { return TurnRule{t, t}; };
  r.turn = {{
    {fixed(PS), fixed(PM), TurnRule{NM, PM}, fixed(NM), fixed(NS)},
    {fixed(ZE), fixed(PS), TurnRule{NM, PM}, fixed(NS), fixed(ZE)},
    {fixed(ZE), fixed(PS), TurnRule{NS, PS}, fixed(NS), fixed(ZE)},
  }};
  return r;
}

int distance_row(Term t)
{
  switch (t) {
    case Term::ZE: return 0;
    case Term::PS: return 1;
    case Term::PM: return 2;
    default: break;
  }
  throw std::invalid_argument("distance terms are ZE, PS, PM");
}

TurnTable resolve_turn_table(const RuleBase & rules, Side side)
{
  TurnTable t{};
  for (int d = 0; d < 3; ++d) {
    for (int a = 0; a < 5; ++a) {
      const auto & rule = rules.turn[d][a];
      t[d][a] = side == Side::Left ? rule.if_left : rule.if_right;
    }
  }
  return t;
}

Side waypoint_side(const Pose & pose, Vec2 waypoint)
{
  return cross(pose.heading(), waypoint - pose.position()) >= 0.0 ? Side::Left : Side::Right;
}

double FuzzySet::operator()(double x) const
{
  double m = 0.0;
  for (const auto & [mf, level] : clipped) {
    m = std::max(m, std::min(level, mf(x)));
  }
  return m;
}

double coa(const FuzzySet & set, double neutral)
{
  std::vector<double> xs{set.lo, set.hi};
  auto add = [&](double x) {
    if (x > set.lo && x < set.hi) {
      xs.push_back(x);
    }
  };
  for (const auto & [mf, level] : set.clipped) {
    const auto & pts = mf.points();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      add(pts[i].first);
      if (i == 0) {
        continue;
      }
      const auto [x0, g0] = pts[i - 1];
      const auto [x1, g1] = pts[i];
      if ((g0 - level) * (g1 - level) < 0.0) {
        add(x0 + (level - g0) / (g1 - g0) * (x1 - x0));
      }
    }
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  // Between consecutive points each clipped term is linear; add the points
  // where two of them cross so that their max is linear too.
  std::vector<double> crossings;
  for (std::size_t k = 1; k < xs.size(); ++k) {
    const double a = xs[k - 1];
    const double b = xs[k];
    for (std::size_t i = 0; i < set.clipped.size(); ++i) {
      const auto & [mi, li] = set.clipped[i];
      const double ia = std::min(li, mi(a));
      const double ib = std::min(li, mi(b));
      for (std::size_t j = i + 1; j < set.clipped.size(); ++j) {
        const auto & [mj, lj] = set.clipped[j];
        const double da = ia - std::min(lj, mj(a));
        const double db = ib - std::min(lj, mj(b));
        if (da * db < 0.0) {
          crossings.push_back(a + da / (da - db) * (b - a));
        }
      }
    }
  }
  for (const double x : crossings) {
    add(x);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  double area = 0.0;
  double moment = 0.0;
  double fa = set(xs.front());
  for (std::size_t k = 1; k < xs.size(); ++k) {
    const double a = xs[k - 1];
    const double b = xs[k];
    const double fb = set(b);
    const double w = b - a;
    area += w * (fa + fb) / 2.0;
    moment += w / 6.0 * (fa * (2.0 * a + b) + fb * (a + 2.0 * b));
    fa = fb;
  }
  if (!(area > 0.0)) {
    return neutral;
  }
  return std::clamp(moment / area, set.lo, set.hi);
}

FuzzyAvoider::FuzzyAvoider(AvoidanceConfig cfg, RuleBase rules)
: cfg_(cfg),
  rules_(rules),
  angle_(make_angle_variable(cfg.membership)),
  distance_(make_distance_variable(cfg.membership)),
  speed_(make_speed_variable(cfg.v_max)),
  turn_(make_turn_variable(cfg.omega_max))
{
  if (!(cfg_.avoidance_range > 0.0 && cfg_.v_max > 0.0 && cfg_.omega_max > 0.0)) {
    throw std::invalid_argument("avoidance range, v_max and omega_max must be positive");
  }
  angle_.validate();
  distance_.validate();
  speed_.validate();
  turn_.validate();
}

AvoidanceCommand FuzzyAvoider::infer(const LaserScan & scan, const Pose & pose,
  Vec2 waypoint) const
{
  return infer(scan, waypoint_side(pose, waypoint));
}

AvoidanceCommand FuzzyAvoider::infer(const LaserScan & scan, Side side) const
{
  if (scan.beams.empty()) {
    throw Error(ErrorCode::EmptyScan, "laser scan has no beams");
  }
  const TurnTable turn_table = resolve_turn_table(rules_, side);
  Grades speed_levels{};
  Grades turn_levels{};
  bool engaged = false;

  for (const auto & beam : scan.beams) {
    if (!beam.hit || beam.range > cfg_.avoidance_range) {
      continue;
    }
    engaged = true;
    const auto ga = fuzzify(beam.bearing / (std::numbers::pi / 2.0), angle_);
    const auto gd = fuzzify(beam.range / cfg_.avoidance_range, distance_);
    for (const auto dt : kMagnitudeTerms) {
      const double md = gd[static_cast<int>(dt)];
      if (md <= 0.0) {
        continue;
      }
      const int row = distance_row(dt);
      for (const auto at : kAllTerms) {
        const double strength = std::min(md, ga[static_cast<int>(at)]);
        if (strength <= 0.0) {
          continue;
        }
        auto & s = speed_levels[static_cast<int>(rules_.speed[row][static_cast<int>(at)])];
        s = std::max(s, strength);
        auto & t = turn_levels[static_cast<int>(turn_table[row][static_cast<int>(at)])];
        t = std::max(t, strength);
      }
    }
  }

  if (!engaged) {
    return {cfg_.v_max, 0.0, false};
  }

  auto aggregate = [](const LinguisticVariable & var, const Grades & levels) {
    FuzzySet set{var.lo, var.hi, {}};
    for (const auto & [term, mf] : var.terms) {
      const double level = levels[static_cast<int>(term)];
      if (level > 0.0) {
        set.clipped.emplace_back(mf, level);
      }
    }
    return set;
  };
  AvoidanceCommand cmd;
  cmd.engaged = true;
  cmd.speed = std::clamp(coa(aggregate(speed_, speed_levels), cfg_.v_max), 0.0, cfg_.v_max);
  cmd.turn_rate =
    std::clamp(coa(aggregate(turn_, turn_levels), 0.0), -cfg_.omega_max, cfg_.omega_max);
  return cmd;
}

bool steering_settled(const AvoidanceCommand & cmd, double epsilon)
{
  return !cmd.engaged || std::abs(cmd.turn_rate) < epsilon;
}

std::string describe_rules(const FuzzyAvoider & avoider)
{
  std::ostringstream out;
  out << std::setprecision(6);
  auto describe_var = [&](const LinguisticVariable & var) {
    out << var.name << " [" << var.lo << ", " << var.hi << "]\n";
    for (const auto & [term, mf] : var.terms) {
      out << "  " << to_string(term) << ":";
      if (mf.left_shoulder()) {
        out << " <-";
      }
      for (const auto & [x, g] : mf.points()) {
        out << " (" << x << ", " << g << ")";
      }
      if (mf.right_shoulder()) {
        out << " ->";
      }
      out << "\n";
    }
  };
  describe_var(avoider.angle());
  describe_var(avoider.distance());
  describe_var(avoider.speed());
  describe_var(avoider.turn());

  auto header = [&](const char * title) {
    out << "\n" << title << "\n  dist\\angle";
    for (const auto t : kAllTerms) {
      out << std::setw(5) << to_string(t);
    }
    out << "\n";
  };
  header("speed rules");
  for (const auto d : kMagnitudeTerms) {
    out << "  " << std::setw(10) << std::left << to_string(d) << std::right;
    for (const auto a : kAllTerms) {
      out << std::setw(5) << to_string(avoider.rules().speed[distance_row(d)][static_cast<int>(a)]);
    }
    out << "\n";
  }
  for (const auto side : {Side::Left, Side::Right}) {
    const auto table = resolve_turn_table(avoider.rules(), side);
    header((std::string("turn-rate rules, waypoint ") + to_string(side)).c_str());
    for (const auto d : kMagnitudeTerms) {
      out << "  " << std::setw(10) << std::left << to_string(d) << std::right;
      for (const auto a : kAllTerms) {
        out << std::setw(5) << to_string(table[distance_row(d)][static_cast<int>(a)]);
      }
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace wavenav
