#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "distwatch/box.hpp"

namespace distwatch {

struct Centroid {
  double x = 0.0;
  double y = 0.0;
  std::size_t source_index = 0;
};

struct CalibrationProfile {
  double pixels_per_unit = 1.0;
  std::string unit = "px";
};

/// Ordered Low < Medium < High.
enum class RiskLevel { Low = 0, Medium = 1, High = 2 };

char risk_code(RiskLevel level) noexcept;
std::string_view risk_name(RiskLevel level) noexcept;

inline constexpr double kDefaultHighBelow = 200.0;
inline constexpr double kDefaultMediumUpper = 250.0;
inline constexpr double kDefaultViolationBelow = 200.0;
inline constexpr double kDefaultCalibratedViolationBelow = 50.0;

/// High: d < high_below. Medium: high_below <= d <= medium_upper. Low: above.
/// A pair violates when d < violation_below.
struct Thresholds {
  double high_below = kDefaultHighBelow;
  double medium_upper = kDefaultMediumUpper;
  double violation_below = kDefaultViolationBelow;

  /// Throws ConfigError.
  void validate() const;
};

struct DistanceRecord {
  std::size_t i = 0;
  std::size_t j = 0;
  double distance_px = 0.0;
  std::optional<double> distance_units;
  RiskLevel risk = RiskLevel::Low;
  bool violating = false;
};

Centroid centroid(const Detection& d, std::size_t source_index = 0) noexcept;
double euclidean(const Centroid& a, const Centroid& b) noexcept;
double to_units(double distance_px, const std::optional<CalibrationProfile>& cal) noexcept;
RiskLevel classify_risk(double distance_units, const Thresholds& t) noexcept;

/// All i<j pairs in (i,j) order. Parallel over i; identical to the serial reference.
std::vector<DistanceRecord> pairwise(std::span<const Centroid> persons, const Thresholds& t,
                                     const std::optional<CalibrationProfile>& cal);

inline constexpr std::size_t pair_count(std::size_t n) noexcept { return n < 2 ? 0 : n * (n - 1) / 2; }

/// key=value file: pixels_per_unit, unit, high_below, medium_upper, violation_below.
struct CalibrationFile {
  std::optional<CalibrationProfile> profile;
  Thresholds thresholds;
};

/// Missing threshold keys keep defaults; violation_below defaults to 50 when
/// pixels_per_unit is present. Throws ConfigError on non-positive scale or
/// unknown keys, ParseError on malformed lines.
CalibrationFile parse_calibration(std::istream& in, const std::filesystem::path& origin = "<stream>");
CalibrationFile read_calibration(const std::filesystem::path& path);

}  // namespace distwatch
