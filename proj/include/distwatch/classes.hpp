#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace distwatch {

/// Ordered class names plus the subset that counts as a person for distancing.
struct ClassRegistry {
  std::string name;
  std::vector<std::string> class_names;
  std::vector<int> person_ids;

  int size() const noexcept { return static_cast<int>(class_names.size()); }
  bool contains(int class_id) const noexcept { return class_id >= 0 && class_id < size(); }
  bool is_person(int class_id) const noexcept;
  std::optional<int> index_of(std::string_view class_name) const;
};

/// 80 COCO classes, person first.
const ClassRegistry& coco_registry();

/// 10 Visdrone classes in benchmark row order; Pedestrian and People are person-like.
const ClassRegistry& visdrone_registry();

/// "coco" or "visdrone"; throws ConfigError otherwise.
const ClassRegistry& registry_by_name(std::string_view name);

}  // namespace distwatch
