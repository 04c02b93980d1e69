#include "distwatch/geometry.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "common/text.hpp"
#include "distwatch/errors.hpp"
#include "geometry/pair_kernel.hpp"

namespace distwatch {

char risk_code(RiskLevel level) noexcept {
  switch (level) {
    case RiskLevel::High: return 'H';
    case RiskLevel::Medium: return 'M';
    case RiskLevel::Low: return 'L';
  }
  return '?';
}

std::string_view risk_name(RiskLevel level) noexcept {
  switch (level) {
    case RiskLevel::High: return "High";
    case RiskLevel::Medium: return "Medium";
    case RiskLevel::Low: return "Low";
  }
  return "?";
}

void Thresholds::validate() const {
  if (!(high_below > 0.0)) throw ConfigError("high_below must be positive");
  if (!(high_below <= medium_upper)) throw ConfigError("high_below must not exceed medium_upper");
  if (!(violation_below >= 0.0)) throw ConfigError("violation_below must be non-negative");
}

Centroid centroid(const Detection& d, std::size_t source_index) noexcept {
  return {(d.box.x1 + d.box.x2) / 2.0, (d.box.y1 + d.box.y2) / 2.0, source_index};
}

double euclidean(const Centroid& a, const Centroid& b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

double to_units(double distance_px, const std::optional<CalibrationProfile>& cal) noexcept {
  return cal ? distance_px / cal->pixels_per_unit : distance_px;
}

RiskLevel classify_risk(double d, const Thresholds& t) noexcept {
  if (d < t.high_below) return RiskLevel::High;
  if (d <= t.medium_upper) return RiskLevel::Medium;
  return RiskLevel::Low;
}

std::vector<DistanceRecord> pairwise(std::span<const Centroid> persons, const Thresholds& t,
                                     const std::optional<CalibrationProfile>& cal) {
  const std::size_t n = persons.size();
  std::vector<DistanceRecord> out(pair_count(n));
  if (out.empty()) return out;
  const auto rows = static_cast<std::ptrdiff_t>(n) - 1;
  // Row i starts at i*n - i(i+1)/2; rows shrink, so hand them out dynamically.
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t ii = 0; ii < rows; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    std::size_t k = i * n - i * (i + 1) / 2;
    for (std::size_t j = i + 1; j < n; ++j) out[k++] = detail::make_record(persons, i, j, t, cal);
  }
  return out;
}

CalibrationFile parse_calibration(std::istream& in, const std::filesystem::path& origin) {
  CalibrationFile result;
  std::optional<double> ppu;
  std::string unit = "units";
  std::optional<double> high, medium, violation;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view s = text::trim(line);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ParseError(origin, line_no, "expected key=value");
    const std::string_view key = text::trim(s.substr(0, eq));
    const std::string_view value = text::trim(s.substr(eq + 1));
    if (key == "unit") {
      unit = std::string(value);
      continue;
    }
    const auto number = text::parse_number<double>(value);
    if (!number) throw ParseError(origin, line_no, "value for '" + std::string(key) + "' is not a number");
    if (key == "pixels_per_unit") {
      if (!(*number > 0.0)) throw ConfigError(origin.string() + ": pixels_per_unit must be positive");
      ppu = *number;
    } else if (key == "high_below") {
      high = *number;
    } else if (key == "medium_upper") {
      medium = *number;
    } else if (key == "violation_below") {
      violation = *number;
    } else {
      throw ConfigError(origin.string() + ":" + std::to_string(line_no) + ": unknown calibration key '" +
                        std::string(key) + "'");
    }
  }
  if (ppu) result.profile = CalibrationProfile{*ppu, unit};
  if (high) result.thresholds.high_below = *high;
  if (medium) result.thresholds.medium_upper = *medium;
  result.thresholds.violation_below =
      violation.value_or(ppu ? kDefaultCalibratedViolationBelow : kDefaultViolationBelow);
  result.thresholds.validate();
  return result;
}

CalibrationFile read_calibration(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open calibration file " + path.string());
  return parse_calibration(in, path);
}

}  // namespace distwatch
