#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "distwatch/box.hpp"
#include "distwatch/classes.hpp"
#include "distwatch/detection_file.hpp"

namespace distwatch {

/// class_id is -1 for class-less ignored regions.
struct GroundTruthRecord {
  std::string image_id;
  int class_id = -1;
  Box box;
  bool ignore = false;
};

/// Devkit rows `left,top,width,height,score,category,truncation,occlusion`.
/// Category 0, 11, or score 0 become ignore-flagged. Throws ParseError.
std::vector<GroundTruthRecord> parse_visdrone(std::istream& in, const std::string& image_id,
                                              const ClassRegistry& registry,
                                              const std::filesystem::path& origin = "<stream>");
std::vector<GroundTruthRecord> read_visdrone_file(const std::filesystem::path& path,
                                                  const ClassRegistry& registry);

/// Annotation `.txt` files in lexicographic order; the n-th file is image n.
struct AnnotationSet {
  std::vector<std::string> image_ids;
  std::vector<std::vector<GroundTruthRecord>> per_image;
};
AnnotationSet read_visdrone_dir(const std::filesystem::path& dir, const ClassRegistry& registry);

enum class MatchLabel { TruePositive, FalsePositive, Ignored };

struct MatchResult {
  /// Indexed like the input detections.
  std::vector<MatchLabel> labels;
  /// Indexed like the input ground truth; ignored GTs never match.
  std::vector<bool> gt_matched;
  std::size_t num_gt = 0;  // non-ignored
};

/// Greedy confidence-ordered matching for one image and one class.
MatchResult match_detections(std::span<const Detection> dets, std::span<const GroundTruthRecord> gts,
                             double iou_threshold);

struct ScoredLabel {
  double confidence = 0.0;
  bool true_positive = false;
};

/// 101-point interpolated AP in [0,1]. Zero when num_gt is zero.
double average_precision(std::span<const ScoredLabel> labels, std::size_t num_gt);

/// Interior of evaluation: per-class scored labels over all images.
struct ClassAccumulator {
  std::vector<ScoredLabel> labels;
  std::size_t num_gt = 0;
};

inline constexpr int kIouThresholdCount = 10;
double iou_threshold_at(int k) noexcept;  // 0.50 + 0.05 k

struct ClassMetrics {
  std::string class_name;
  double precision = 0.0;  // percent
  double recall = 0.0;
  double map_50_95 = 0.0;
  double map_50 = 0.0;

  friend bool operator==(const ClassMetrics&, const ClassMetrics&) = default;
};

struct PrPoint {
  double precision = 0.0;  // percent
  double recall = 0.0;
  bool precision_defined = true;
  bool recall_defined = true;
};

/// Detections of every class for one image; frame n of a detection file.
struct ImageDetections {
  std::vector<Detection> detections;
};

struct EvalOptions {
  double confidence_cutoff = 0.25;
};

/// Counting at IoU 0.5 over detections with conf >= cutoff for one class
/// (class_id < 0: every class pooled).
PrPoint pr_point(std::span<const ImageDetections> dets, const AnnotationSet& gts, int class_id,
                 double confidence_cutoff);

struct EvalResult {
  /// "All" first, then one row per registry class.
  std::vector<ClassMetrics> rows;
  std::vector<bool> class_present;  // registry order; GT present
};

/// AP@0.5 and AP@[.5:.95] per class plus the unweighted "All" mean over
/// classes present in the ground truth. Parallel over (threshold, class).
EvalResult map_range(std::span<const ImageDetections> dets, const AnnotationSet& gts,
                     const ClassRegistry& registry, const EvalOptions& options = {});

/// Aligns a detection file to annotation images by frame index.
std::vector<ImageDetections> align_detections(std::span<const DetectionFileRecord> records,
                                              std::size_t image_count);

struct BenchmarkTable {
  std::string model;
  int size_pixels = 640;
  std::vector<ClassMetrics> rows;
};

/// Text table: header, then `<model> <size> <class> <P> <R> <mAP.5:.95> <mAP.5>`
/// rows with one decimal.
std::string format_benchmark_text(const BenchmarkTable& table);

/// key=value sidecar, one row per line, values in shortest round-trip form.
std::string format_benchmark_sidecar(const BenchmarkTable& table);
BenchmarkTable parse_benchmark_sidecar(std::istream& in, const std::filesystem::path& origin = "<stream>");

/// Rows in the order "All" then registry order; rows absent from `metrics`
/// are skipped.
BenchmarkTable benchmark_table(const std::string& model, std::span<const ClassMetrics> metrics,
                               const ClassRegistry& registry, int size_pixels = 640);

}  // namespace distwatch
