#pragma once

// Per-row resampling shared by the parallel and reference letterbox paths.

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "distwatch/image.hpp"
#include "distwatch/preprocess.hpp"

namespace distwatch::detail {

inline void fill_row(std::uint8_t* dst, int width, std::uint8_t value) {
  std::fill(dst, dst + static_cast<std::ptrdiff_t>(width) * 3, value);
}

/// Writes output row `dy` of the target raster.
inline void letterbox_row(const Image& src, Image& dst, const LetterboxTransform& t, Resample mode,
                          std::uint8_t pad, int dy) {
  std::uint8_t* out = dst.row(dy);
  const int cy = dy - t.pad_top;
  if (cy < 0 || cy >= t.content_height) {
    fill_row(out, dst.width(), pad);
    return;
  }
  fill_row(out, t.pad_left, pad);
  const int right = t.pad_left + t.content_width;
  fill_row(out + static_cast<std::ptrdiff_t>(right) * 3, dst.width() - right, pad);

  const double sx_ratio = static_cast<double>(src.width()) / t.content_width;
  const double sy_ratio = static_cast<double>(src.height()) / t.content_height;
  std::uint8_t* px = out + static_cast<std::ptrdiff_t>(t.pad_left) * 3;

  if (mode == Resample::Nearest) {
    const int sy = std::min(src.height() - 1, static_cast<int>((cy + 0.5) * sy_ratio));
    const std::uint8_t* srow = src.row(sy);
    for (int cx = 0; cx < t.content_width; ++cx) {
      const int sx = std::min(src.width() - 1, static_cast<int>((cx + 0.5) * sx_ratio));
      const std::uint8_t* s = srow + static_cast<std::ptrdiff_t>(sx) * 3;
      px[0] = s[0];
      px[1] = s[1];
      px[2] = s[2];
      px += 3;
    }
    return;
  }

  const double fy = std::clamp((cy + 0.5) * sy_ratio - 0.5, 0.0, static_cast<double>(src.height() - 1));
  const int y0 = static_cast<int>(fy);
  const int y1 = std::min(y0 + 1, src.height() - 1);
  const double wy = fy - y0;
  const std::uint8_t* r0 = src.row(y0);
  const std::uint8_t* r1 = src.row(y1);
  for (int cx = 0; cx < t.content_width; ++cx) {
    const double fx = std::clamp((cx + 0.5) * sx_ratio - 0.5, 0.0, static_cast<double>(src.width() - 1));
    const int x0 = static_cast<int>(fx);
    const int x1 = std::min(x0 + 1, src.width() - 1);
    const double wx = fx - x0;
    for (int c = 0; c < 3; ++c) {
      const double top = r0[x0 * 3 + c] * (1.0 - wx) + r0[x1 * 3 + c] * wx;
      const double bottom = r1[x0 * 3 + c] * (1.0 - wx) + r1[x1 * 3 + c] * wx;
      px[c] = static_cast<std::uint8_t>(std::lround(top * (1.0 - wy) + bottom * wy));
    }
    px += 3;
  }
}

}  // namespace distwatch::detail
