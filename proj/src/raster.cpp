#include "wavenav/raster.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <sstream>

#include "wavenav/error.hpp"

namespace wavenav
{

namespace
{

class PgmReader
{
public:
  explicit PgmReader(std::string_view bytes) : bytes_(bytes) {}

  void skip_space_and_comments()
  {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') {
          ++pos_;
        }
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long read_uint(const char * what)
  {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      throw Error(ErrorCode::MalformedMap, std::string("expected ") + what);
    }
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000L) {
        throw Error(ErrorCode::MalformedMap, std::string(what) + " too large");
      }
      ++pos_;
    }
    return value;
  }

  std::string_view take(std::size_t n)
  {
    if (bytes_.size() - pos_ < n) {
      throw Error(ErrorCode::MalformedMap, "truncated pixel data");
    }
    auto out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  std::string_view magic()
  {
    if (bytes_.size() < 2) {
      throw Error(ErrorCode::MalformedMap, "missing magic number");
    }
    pos_ = 2;
    return bytes_.substr(0, 2);
  }

  void expect_single_whitespace()
  {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      throw Error(ErrorCode::MalformedMap, "missing whitespace before pixel data");
    }
    ++pos_;
  }

private:
  std::string_view bytes_;
  std::size_t pos_{0};
};

}  // namespace

GrayImage parse_pgm(std::string_view bytes)
{
  PgmReader reader(bytes);
  const auto magic = reader.magic();
  const bool binary = magic == "P5";
  if (!binary && magic != "P2") {
    throw Error(ErrorCode::MalformedMap, "unsupported magic number '" + std::string(magic) + "'");
  }
  const long width = reader.read_uint("width");
  const long height = reader.read_uint("height");
  const long maxval = reader.read_uint("maxval");
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::MalformedMap, "zero dimension");
  }
  if (maxval <= 0 || maxval > 65535) {
    throw Error(ErrorCode::MalformedMap, "maxval out of range");
  }
  if (binary && maxval > 255) {
    throw Error(ErrorCode::MalformedMap, "16-bit binary PGM not supported");
  }

  GrayImage image;
  image.width = static_cast<int>(width);
  image.height = static_cast<int>(height);
  const auto count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  image.pixels.resize(count);

  auto rescale = [maxval](long v) {
    if (v > maxval) {
      throw Error(ErrorCode::MalformedMap, "sample exceeds maxval");
    }
    return static_cast<std::uint8_t>(maxval == 255 ? v : (v * 255 + maxval / 2) / maxval);
  };

  if (binary) {
    reader.expect_single_whitespace();
    const auto raw = reader.take(count);
    for (std::size_t i = 0; i < count; ++i) {
      image.pixels[i] = rescale(static_cast<unsigned char>(raw[i]));
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        image.pixels[i] = rescale(reader.read_uint("sample"));
      } catch (const Error &) {
        throw Error(ErrorCode::MalformedMap, "truncated pixel data");
      }
    }
  }
  return image;
}

std::string encode_pgm(const GrayImage & image, const std::vector<std::string> & comments)
{
  std::ostringstream out;
  out << "P5\n";
  for (const auto & c : comments) {
    out << "# " << c << "\n";
  }
  out << image.width << " " << image.height << "\n255\n";
  out.write(reinterpret_cast<const char *>(image.pixels.data()),
    static_cast<std::streamsize>(image.pixels.size()));
  return out.str();
}

std::string encode_ppm(const RgbImage & image)
{
  std::ostringstream out;
  out << "P6\n" << image.width << " " << image.height << "\n255\n";
  for (const auto & px : image.pixels) {
    out.write(reinterpret_cast<const char *>(px.data()), 3);
  }
  return out.str();
}

std::string read_file(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string & path, std::string_view bytes)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace wavenav
