#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "distwatch/box.hpp"
#include "distwatch/classes.hpp"
#include "distwatch/preprocess.hpp"

namespace distwatch {

struct AnchorSize {
  double width = 0.0;
  double height = 0.0;

  friend bool operator==(const AnchorSize&, const AnchorSize&) = default;
};

/// Priors for one detection head.
struct AnchorLayer {
  int stride = 0;
  std::vector<AnchorSize> anchors;

  friend bool operator==(const AnchorLayer&, const AnchorLayer&) = default;
};

/// One AnchorLayer per head, strides strictly increasing from {8,16,32,64}.
struct AnchorSet {
  std::vector<AnchorLayer> layers;

  /// Throws FormatError when an invariant is broken.
  void validate() const;

  friend bool operator==(const AnchorSet&, const AnchorSet&) = default;
};

/// Anchors plus class names, as found in the model metadata sidecar.
struct ModelMetadata {
  AnchorSet anchors;
  std::vector<std::string> class_names;
};

/// Reads `stride: w1,h1 w2,h2 w3,h3` lines. `classes=` / `names=` lines and
/// `#` comments are accepted so a full sidecar parses too.
ModelMetadata parse_model_metadata(std::istream& in, const std::filesystem::path& origin = "<stream>");
ModelMetadata read_model_metadata(const std::filesystem::path& path);
AnchorSet read_anchor_file(const std::filesystem::path& path);
void write_model_metadata(std::ostream& out, const ModelMetadata& meta);

/// One head's logits, layout [anchor][grid_y][grid_x][channel] with channels
/// tx, ty, tw, th, objectness, class scores...
struct RawLayerOutput {
  int layer_index = 0;
  int stride = 0;
  int num_anchors = 0;
  int grid_h = 0;
  int grid_w = 0;
  int channels = 0;
  std::vector<float> values;

  int num_classes() const noexcept { return channels - 5; }
  std::size_t expected_size() const noexcept {
    return static_cast<std::size_t>(num_anchors) * grid_h * grid_w * channels;
  }
  std::size_t offset(int anchor, int gy, int gx) const noexcept {
    return ((static_cast<std::size_t>(anchor) * grid_h + gy) * grid_w + gx) * channels;
  }

  /// Zero-filled tensor with the given geometry.
  static RawLayerOutput zeros(int layer_index, int stride, int num_anchors, int grid, int channels);
};

struct DecodeConfig {
  double confidence_threshold = 0.25;
  double nms_iou_threshold = 0.45;
  std::size_t max_detections = 300;
  int target_size = kDefaultTargetSize;
  /// false: one candidate per (anchor, cell) for the best class.
  /// true: one candidate per (anchor, cell, class) passing the threshold.
  bool multi_label = false;
  ClassRegistry registry = coco_registry();

  /// Throws ConfigError.
  void validate() const;
};

double sigmoid(double x) noexcept;

/// Checks tensor geometry against the anchors and config. Throws FormatError.
void validate_layer(const RawLayerOutput& raw, const AnchorSet& anchors, const DecodeConfig& cfg);

/// Candidates in letterboxed coordinates, unsorted, not suppressed.
/// Parallel over (anchor, row); output order equals the serial scan order.
std::vector<Detection> decode_layer(const RawLayerOutput& raw, const AnchorSet& anchors,
                                    const DecodeConfig& cfg);

double iou(const Box& a, const Box& b) noexcept;

/// Greedy class-aware NMS. Rank order is confidence desc, class_id asc,
/// x1 asc, then input order.
std::vector<Detection> nms(std::vector<Detection> candidates, const DecodeConfig& cfg);

/// decode_layer over all heads, then nms, then unmap_box into original pixels.
std::vector<Detection> decode_frame(std::span<const RawLayerOutput> layers, const AnchorSet& anchors,
                                    const DecodeConfig& cfg, const LetterboxTransform& transform,
                                    int orig_w, int orig_h);

/// TENSV1 raw tensor file.
std::vector<RawLayerOutput> read_tensor_file(const std::filesystem::path& path);
std::vector<RawLayerOutput> parse_tensor_stream(std::istream& in, const std::filesystem::path& origin);
void write_tensor_file(const std::filesystem::path& path, std::span<const RawLayerOutput> layers);

}  // namespace distwatch
