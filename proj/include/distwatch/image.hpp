#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace distwatch {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// 8-bit, 3-channel, row-major RGB raster.
class Image {
 public:
  Image() = default;
  Image(int width, int height, Rgb fill = {});

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return data_.empty(); }

  std::span<std::uint8_t> pixels() noexcept { return data_; }
  std::span<const std::uint8_t> pixels() const noexcept { return data_; }

  std::uint8_t* row(int y) noexcept { return data_.data() + static_cast<std::size_t>(y) * width_ * 3; }
  const std::uint8_t* row(int y) const noexcept {
    return data_.data() + static_cast<std::size_t>(y) * width_ * 3;
  }

  Rgb at(int x, int y) const noexcept {
    const std::uint8_t* p = row(y) + static_cast<std::size_t>(x) * 3;
    return {p[0], p[1], p[2]};
  }
  void set(int x, int y, Rgb c) noexcept {
    std::uint8_t* p = row(y) + static_cast<std::size_t>(x) * 3;
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
  }
  bool contains(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  /// Takes ownership of an existing buffer; size must be width*height*3.
  static Image from_bytes(int width, int height, std::vector<std::uint8_t> bytes);

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Decodes P6 (binary) or P3 (ASCII) PPM with maxval 255. Throws FormatError.
Image read_ppm(const std::filesystem::path& path);
Image decode_ppm(std::span<const std::uint8_t> bytes);

void write_ppm(const std::filesystem::path& path, const Image& image);
std::vector<std::uint8_t> encode_ppm(const Image& image);

}  // namespace distwatch
