#include "distwatch/reference.hpp"
#include "geometry/pair_kernel.hpp"

namespace distwatch::reference {

std::vector<DistanceRecord> pairwise(std::span<const Centroid> persons, const Thresholds& t,
                                     const std::optional<CalibrationProfile>& cal) {
  std::vector<DistanceRecord> out;
  out.reserve(pair_count(persons.size()));
  for (std::size_t i = 0; i < persons.size(); ++i) {
    for (std::size_t j = i + 1; j < persons.size(); ++j) out.push_back(detail::make_record(persons, i, j, t, cal));
  }
  return out;
}

}  // namespace distwatch::reference
