#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <string>

#include "distwatch/monitor.hpp"

namespace distwatch {

Rgb to_rgb(BoxColor color) noexcept {
  switch (color) {
    case BoxColor::Red: return kColorRed;
    case BoxColor::Yellow: return kColorYellow;
    case BoxColor::Green: return kColorGreen;
  }
  return kColorGreen;
}

AnnotationSpec annotation_spec(const FrameReport& report) {
  AnnotationSpec spec;
  std::vector<bool> violating(report.person_count(), false);
  for (std::size_t k : report.violating) violating[k] = true;

  for (std::size_t k = 0; k < report.person_count(); ++k) {
    const auto& risk = report.person_risk[k];
    PersonAnnotation a;
    a.box = report.persons[k].box;
    if (violating[k] || risk == RiskLevel::High) {
      a.color = BoxColor::Red;
    } else if (risk == RiskLevel::Medium) {
      a.color = BoxColor::Yellow;
    } else {
      a.color = BoxColor::Green;
    }
    a.label = risk ? std::string(1, risk_code(*risk)) : std::string("-");
    spec.persons.push_back(std::move(a));
  }
  for (const DistanceRecord& p : report.pairs) {
    if (!p.violating) continue;
    const Centroid& a = report.centroids[p.i];
    const Centroid& b = report.centroids[p.j];
    spec.lines.push_back({a.x, a.y, b.x, b.y});
  }
  return spec;
}

namespace {

int to_px(double v) { return static_cast<int>(std::lround(v)); }

void put(Image& img, int x, int y, Rgb c) {
  if (img.contains(x, y)) img.set(x, y, c);
}

/// Bresenham with a second pixel across the minor axis for a 2-px stroke.
void draw_line(Image& img, int x0, int y0, int x1, int y1, Rgb c) {
  const int dx = std::abs(x1 - x0);
  const int dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1;
  const int sy = y0 < y1 ? 1 : -1;
  const bool steep = -dy > dx;
  int err = dx + dy;
  while (true) {
    put(img, x0, y0, c);
    if (steep) {
      put(img, x0 + 1, y0, c);
    } else {
      put(img, x0, y0 + 1, c);
    }
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

void draw_rect(Image& img, const Box& b, Rgb c) {
  const int x1 = std::clamp(to_px(b.x1), 0, img.width() - 1);
  const int x2 = std::clamp(to_px(b.x2), 0, img.width() - 1);
  const int y1 = std::clamp(to_px(b.y1), 0, img.height() - 1);
  const int y2 = std::clamp(to_px(b.y2), 0, img.height() - 1);
  for (int x = x1; x <= x2; ++x) {
    put(img, x, y1, c);
    put(img, x, y2, c);
  }
  for (int y = y1; y <= y2; ++y) {
    put(img, x1, y, c);
    put(img, x2, y, c);
  }
}

// 3x5 glyphs, one row per entry, bit 2 = leftmost column.
using Glyph = std::array<std::uint8_t, 5>;

const Glyph* glyph_for(char ch) {
  static const Glyph h{0b101, 0b101, 0b111, 0b101, 0b101};
  static const Glyph m{0b101, 0b111, 0b111, 0b101, 0b101};
  static const Glyph l{0b100, 0b100, 0b100, 0b100, 0b111};
  static const Glyph dash{0b000, 0b000, 0b111, 0b000, 0b000};
  switch (ch) {
    case 'H': return &h;
    case 'M': return &m;
    case 'L': return &l;
    case '-': return &dash;
    default: return nullptr;
  }
}

void draw_label(Image& img, const Box& box, const std::string& label, Rgb c) {
  int x = to_px(box.x1);
  // Above the box when there is room, otherwise just inside its top edge.
  int y = to_px(box.y1) - 6;
  if (y < 0) y = to_px(box.y1) + 2;
  for (char ch : label) {
    if (const Glyph* g = glyph_for(ch)) {
      for (int row = 0; row < 5; ++row) {
        for (int col = 0; col < 3; ++col) {
          if ((*g)[static_cast<std::size_t>(row)] & (0b100 >> col)) put(img, x + col, y + row, c);
        }
      }
    }
    x += 4;
  }
}

}  // namespace

Image annotate(const Image& frame, const FrameReport& report) {
  Image out = frame;
  const AnnotationSpec spec = annotation_spec(report);
  for (const PairLine& l : spec.lines) draw_line(out, to_px(l.x0), to_px(l.y0), to_px(l.x1), to_px(l.y1), kColorRed);
  for (const PersonAnnotation& p : spec.persons) draw_rect(out, p.box, to_rgb(p.color));
  for (const PersonAnnotation& p : spec.persons) draw_label(out, p.box, p.label, kColorLabel);
  return out;
}

}  // namespace distwatch
