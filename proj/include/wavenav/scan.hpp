#ifndef WAVENAV_SCAN_HPP_
#define WAVENAV_SCAN_HPP_

#include <vector>

namespace wavenav
{

struct Beam
{
  double bearing{0.0};  // rad, relative to robot heading, positive = left
  double range{0.0};    // m
  bool hit{false};
};

/// One 180 degree sweep. Bearings are uniformly spaced over [-pi/2, pi/2];
/// a beam without a hit reports max_range.
struct LaserScan
{
  std::vector<Beam> beams;
  double max_range{0.0};
};

}  // namespace wavenav

#endif  // WAVENAV_SCAN_HPP_
