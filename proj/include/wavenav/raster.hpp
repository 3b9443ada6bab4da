#ifndef WAVENAV_RASTER_HPP_
#define WAVENAV_RASTER_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace wavenav
{

/// 8-bit grayscale image, row 0 at the top.
struct GrayImage
{
  int width{0};
  int height{0};
  std::vector<std::uint8_t> pixels;  // row-major, width * height

  std::uint8_t at(int col, int row) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
  std::uint8_t & at(int col, int row) { return pixels[static_cast<std::size_t>(row) * width + col]; }
};

using Rgb = std::array<std::uint8_t, 3>;

struct RgbImage
{
  int width{0};
  int height{0};
  std::vector<Rgb> pixels;

  Rgb & at(int col, int row) { return pixels[static_cast<std::size_t>(row) * width + col]; }
};

/// Parses a P2 (ASCII) or P5 (binary, maxval < 256) PGM. Samples are rescaled
/// to 0..255 when maxval differs from 255. Throws Error(MalformedMap).
GrayImage parse_pgm(std::string_view bytes);

/// Binary P5 encoding. Each entry of `comments` becomes one "# ..." header line.
std::string encode_pgm(const GrayImage & image, const std::vector<std::string> & comments = {});
std::string encode_ppm(const RgbImage & image);

std::string read_file(const std::string & path);
void write_file(const std::string & path, std::string_view bytes);

}  // namespace wavenav

#endif  // WAVENAV_RASTER_HPP_
