#pragma once

#include <algorithm>

namespace distwatch {

/// Axis-aligned box in corner form. Valid when x1 <= x2 and y1 <= y2.
struct Box {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const noexcept { return x2 - x1; }
  double height() const noexcept { return y2 - y1; }
  double area() const noexcept { return std::max(0.0, width()) * std::max(0.0, height()); }
  bool valid() const noexcept { return x1 <= x2 && y1 <= y2; }

  friend bool operator==(const Box&, const Box&) = default;
};

/// One classified, confidence-scored box.
struct Detection {
  int class_id = 0;
  double confidence = 0.0;
  Box box;

  friend bool operator==(const Detection&, const Detection&) = default;
};

inline Box clip_box(Box b, double max_x, double max_y) noexcept {
  b.x1 = std::clamp(b.x1, 0.0, max_x);
  b.x2 = std::clamp(b.x2, 0.0, max_x);
  b.y1 = std::clamp(b.y1, 0.0, max_y);
  b.y2 = std::clamp(b.y2, 0.0, max_y);
  return b;
}

}  // namespace distwatch
