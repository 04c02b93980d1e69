#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "distwatch/backend.hpp"
#include "distwatch/classes.hpp"
#include "distwatch/errors.hpp"
#include "distwatch/geometry.hpp"
#include "distwatch/image.hpp"

namespace distwatch {

struct MonitorConfig {
  Thresholds thresholds;
  std::optional<CalibrationProfile> calibration;
  ClassRegistry registry = coco_registry();
};

enum class Verdict { Safe, Unsafe };

struct FrameReport {
  std::uint64_t frame_index = 0;
  std::vector<Detection> persons;
  std::vector<Centroid> centroids;
  std::vector<DistanceRecord> pairs;
  std::vector<std::size_t> violating;  // sorted person indices
  std::vector<std::size_t> safe;       // sorted person indices
  /// Worst risk over each person's pairs; empty when the person has no pair.
  std::vector<std::optional<RiskLevel>> person_risk;
  Verdict verdict = Verdict::Safe;

  std::size_t person_count() const noexcept { return persons.size(); }
  std::size_t violating_pairs() const noexcept;
};

inline constexpr Rgb kColorRed{0xFF, 0x00, 0x00};
inline constexpr Rgb kColorYellow{0xFF, 0xFF, 0x00};
inline constexpr Rgb kColorGreen{0x00, 0xFF, 0x00};
inline constexpr Rgb kColorLabel{0xFF, 0xFF, 0xFF};

enum class BoxColor { Green, Yellow, Red };

Rgb to_rgb(BoxColor color) noexcept;

struct PersonAnnotation {
  Box box;
  BoxColor color = BoxColor::Green;
  std::string label;
};

struct PairLine {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;
};

struct AnnotationSpec {
  std::vector<PersonAnnotation> persons;
  std::vector<PairLine> lines;
};

/// Per-risk pair counts are indexed by RiskLevel.
struct SessionStats {
  std::uint64_t frames = 0;
  std::uint64_t persons = 0;
  std::uint64_t pairs = 0;
  std::uint64_t violating_pairs = 0;
  std::array<std::uint64_t, 3> risk_pairs{};
  std::uint64_t max_simultaneous_violations = 0;
  std::uint64_t unsafe_frames = 0;
  std::uint64_t error_frames = 0;
  double elapsed_seconds = 0.0;

  static SessionStats from_report(const FrameReport& report);
  SessionStats& merge(const SessionStats& other);
  double fps() const noexcept;

  /// Equality on every count, ignoring timing.
  bool same_counts(const SessionStats& other) const noexcept;
};

/// Order-preserving subset whose class is person-like in the registry.
std::vector<Detection> filter_persons(std::span<const Detection> dets, const ClassRegistry& registry);

/// Geometry and sets for one frame's detections.
FrameReport build_report(std::uint64_t frame_index, std::span<const Detection> dets,
                         const MonitorConfig& cfg);

/// backend -> filter_persons -> centroids -> pairwise -> sets.
FrameReport process_frame(const FrameInfo& frame, const Image* pixels, Backend& backend,
                          const MonitorConfig& cfg);

AnnotationSpec annotation_spec(const FrameReport& report);

/// Boxes, pair lines and risk labels drawn over a copy of the frame.
Image annotate(const Image& frame, const FrameReport& report);

/// Report stream text for one frame, newline-terminated.
std::string format_report(const FrameReport& report);
void write_report(std::ostream& out, const FrameReport& report);

struct SessionInput {
  FrameInfo info;
  std::optional<Image> image;
};

/// Pull-style frame source; returns nullopt at end of stream.
using FrameFeed = std::function<std::optional<SessionInput>()>;

struct FrameError {
  std::uint64_t frame_index = 0;
  std::string message;
};

struct SessionSinks {
  std::ostream* report = nullptr;
  std::optional<std::filesystem::path> annotate_dir;
  std::function<void(const FrameError&)> on_error;
  std::function<void(const FrameReport&)> on_report;
};

struct SessionOptions {
  /// Frames decoded per parallel batch; sinks see reports in frame order.
  std::size_t batch_size = 64;
};

/// Raised when a backend failure stops the session; carries the partial stats.
class SessionAborted : public Error {
 public:
  SessionAborted(const std::string& what, SessionStats stats) : Error(what), stats_(stats) {}
  const SessionStats& stats() const noexcept { return stats_; }

 private:
  SessionStats stats_;
};

/// Per-frame errors (missing records, unreadable frames) are reported through
/// sinks.on_error and counted; other failures abort with SessionAborted.
SessionStats run_session(const FrameFeed& frames, Backend& backend, const MonitorConfig& cfg,
                         const SessionSinks& sinks, const SessionOptions& options = {});

/// Feed over a fixed list of infos with no pixels.
FrameFeed feed_from_indices(std::vector<std::uint64_t> indices, FrameDims dims);

/// Feed over a FrameSource; errors stay on the source.
FrameFeed feed_from_source(FrameSource& source);

}  // namespace distwatch
