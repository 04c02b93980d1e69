#pragma once

#include <optional>
#include <span>

#include "distwatch/geometry.hpp"

namespace distwatch::detail {

inline DistanceRecord make_record(std::span<const Centroid> persons, std::size_t i, std::size_t j,
                                  const Thresholds& t, const std::optional<CalibrationProfile>& cal) {
  DistanceRecord r;
  r.i = i;
  r.j = j;
  r.distance_px = euclidean(persons[i], persons[j]);
  const double units = to_units(r.distance_px, cal);
  if (cal) r.distance_units = units;
  r.risk = classify_risk(units, t);
  r.violating = units < t.violation_below;
  return r;
}

}  // namespace distwatch::detail
