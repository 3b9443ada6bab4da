#ifndef WAVENAV_RNG_HPP_
#define WAVENAV_RNG_HPP_

#include <cstdint>
#include <random>

namespace wavenav
{

/// SplitMix64 finalizer. Used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seeded random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The uniform and normal draws are computed here rather than via
/// <random> distributions, whose algorithms are implementation-defined, so a
/// given (seed, stream id) yields the same numbers on every platform.
class RandomStream
{
public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id);

  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller (no cached second variate).
  double normal(double mean, double stddev);

private:
  std::mt19937_64 engine_;
};

/// Stream ids: one per consumer, so reordering consumers never shifts draws.
namespace streams
{
inline constexpr std::uint64_t laser_noise = 1;
inline constexpr std::uint64_t odometry_noise = 2;
inline constexpr std::uint64_t entity_base = 100;
}  // namespace streams

}  // namespace wavenav

#endif  // WAVENAV_RNG_HPP_
