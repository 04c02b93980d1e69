#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "distwatch/box.hpp"

namespace distwatch {

struct DetectionFileRecord {
  std::uint64_t frame_index = 0;
  std::vector<Detection> detections;

  friend bool operator==(const DetectionFileRecord&, const DetectionFileRecord&) = default;
};

/// `frame=<n> dets=<k>` then k lines `<class_id> <conf> <x1> <y1> <x2> <y2>`.
/// Frame indices must be unique and increasing. Throws ParseError.
std::vector<DetectionFileRecord> parse_detection_file(std::istream& in,
                                                      const std::filesystem::path& origin = "<stream>");
std::vector<DetectionFileRecord> read_detection_file(const std::filesystem::path& path);

/// Floats are written in shortest round-trip form.
void write_detection_record(std::ostream& out, const DetectionFileRecord& record);
void write_detection_file(std::ostream& out, std::span<const DetectionFileRecord> records);
void write_detection_file(const std::filesystem::path& path, std::span<const DetectionFileRecord> records);

struct SyntheticSceneOptions {
  std::size_t frames = 1000;
  std::size_t persons_per_frame = 50;
  int frame_width = 1920;
  int frame_height = 1080;
  int person_class_id = 0;
  std::uint64_t seed = 1;
};

/// Deterministic random person boxes for benchmarking and tests.
std::vector<DetectionFileRecord> make_synthetic_records(const SyntheticSceneOptions& options);

}  // namespace distwatch
