#include "distwatch/image.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

#include "distwatch/errors.hpp"

namespace distwatch {

Image::Image(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) throw FormatError("image dimensions must be positive");
  data_.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < data_.size(); i += 3) {
    data_[i] = fill.r;
    data_[i + 1] = fill.g;
    data_[i + 2] = fill.b;
  }
}

Image Image::from_bytes(int width, int height, std::vector<std::uint8_t> bytes) {
  if (width <= 0 || height <= 0) throw FormatError("image dimensions must be positive");
  if (bytes.size() != static_cast<std::size_t>(width) * height * 3) {
    throw FormatError("pixel buffer size " + std::to_string(bytes.size()) + " does not match " +
                      std::to_string(width) + "x" + std::to_string(height) + "x3");
  }
  Image img;
  img.width_ = width;
  img.height_ = height;
  img.data_ = std::move(bytes);
  return img;
}

namespace {

class PpmCursor {
 public:
  explicit PpmCursor(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long read_int() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) throw FormatError("malformed PPM header");
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > 1'000'000) throw FormatError("PPM value out of range");
      ++pos_;
    }
    return v;
  }

  std::size_t pos() const noexcept { return pos_; }
  void advance(std::size_t n) noexcept { pos_ += n; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Image decode_ppm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '6' && bytes[1] != '3')) {
    throw FormatError("not a P6/P3 PPM image");
  }
  const bool binary = bytes[1] == '6';
  PpmCursor cur(bytes);
  cur.advance(2);
  const long w = cur.read_int();
  const long h = cur.read_int();
  const long maxval = cur.read_int();
  if (w <= 0 || h <= 0) throw FormatError("PPM dimensions must be positive");
  if (maxval != 255) throw FormatError("only 8-bit PPM (maxval 255) is supported");

  const std::size_t n = static_cast<std::size_t>(w) * h * 3;
  std::vector<std::uint8_t> data(n);
  if (binary) {
    // Exactly one whitespace byte separates the header from the raster.
    cur.advance(1);
    if (bytes.size() < cur.pos() + n) throw FormatError("truncated PPM raster");
    std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(cur.pos()), n, data.begin());
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const long v = cur.read_int();
      if (v > 255) throw FormatError("PPM sample exceeds maxval");
      data[i] = static_cast<std::uint8_t>(v);
    }
  }
  return Image::from_bytes(static_cast<int>(w), static_cast<int>(h), std::move(data));
}

Image read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open image " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_ppm(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_ppm(const Image& image) {
  const std::string header =
      "P6\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.pixels().begin(), image.pixels().end());
  return out;
}

void write_ppm(const std::filesystem::path& path, const Image& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write image " + path.string());
  const auto bytes = encode_ppm(image);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace distwatch
