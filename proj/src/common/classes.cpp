#include "distwatch/classes.hpp"

#include <algorithm>

#include "distwatch/errors.hpp"

namespace distwatch {

bool ClassRegistry::is_person(int class_id) const noexcept {
  return std::find(person_ids.begin(), person_ids.end(), class_id) != person_ids.end();
}

std::optional<int> ClassRegistry::index_of(std::string_view class_name) const {
  for (int i = 0; i < size(); ++i) {
    if (class_names[static_cast<std::size_t>(i)] == class_name) return i;
  }
  return std::nullopt;
}

const ClassRegistry& coco_registry() {
  static const ClassRegistry registry{
      "coco",
      {"person",        "bicycle",      "car",           "motorcycle",    "airplane",     "bus",
       "train",         "truck",        "boat",          "traffic light", "fire hydrant", "stop sign",
       "parking meter", "bench",        "bird",          "cat",           "dog",          "horse",
       "sheep",         "cow",          "elephant",      "bear",          "zebra",        "giraffe",
       "backpack",      "umbrella",     "handbag",       "tie",           "suitcase",     "frisbee",
       "skis",          "snowboard",    "sports ball",   "kite",          "baseball bat", "baseball glove",
       "skateboard",    "surfboard",    "tennis racket", "bottle",        "wine glass",   "cup",
       "fork",          "knife",        "spoon",         "bowl",          "banana",       "apple",
       "sandwich",      "orange",       "broccoli",      "carrot",        "hot dog",      "pizza",
       "donut",         "cake",         "chair",         "couch",         "potted plant", "bed",
       "dining table",  "toilet",       "tv",            "laptop",        "mouse",        "remote",
       "keyboard",      "cell phone",   "microwave",     "oven",          "toaster",      "sink",
       "refrigerator",  "book",         "clock",         "vase",          "scissors",     "teddy bear",
       "hair drier",    "toothbrush"},
      {0}};
  return registry;
}

const ClassRegistry& visdrone_registry() {
  static const ClassRegistry registry{
      "visdrone",
      {"Pedestrian", "People", "Bicycle", "Car", "Van", "Truck", "Tricycle", "Awning-tricycle", "Bus",
       "Motor"},
      {0, 1}};
  return registry;
}

const ClassRegistry& registry_by_name(std::string_view name) {
  if (name == "coco") return coco_registry();
  if (name == "visdrone") return visdrone_registry();
  throw ConfigError("unknown class registry '" + std::string(name) + "' (expected coco or visdrone)");
}

}  // namespace distwatch
