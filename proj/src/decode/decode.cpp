#include "distwatch/decode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "decode/decode_kernels.hpp"
#include "distwatch/errors.hpp"

namespace distwatch {

namespace {

bool is_supported_stride(int s) noexcept { return s == 8 || s == 16 || s == 32 || s == 64; }

}  // namespace

void AnchorSet::validate() const {
  if (layers.size() != 3 && layers.size() != 4) {
    throw FormatError("anchor set must have 3 or 4 layers, got " + std::to_string(layers.size()));
  }
  int previous = 0;
  for (const AnchorLayer& layer : layers) {
    if (!is_supported_stride(layer.stride)) {
      throw FormatError("unsupported stride " + std::to_string(layer.stride) + " (expected 8, 16, 32 or 64)");
    }
    if (layer.stride <= previous) throw FormatError("anchor strides must be strictly increasing");
    previous = layer.stride;
    if (layer.anchors.empty()) throw FormatError("stride " + std::to_string(layer.stride) + " has no anchors");
    for (const AnchorSize& a : layer.anchors) {
      if (!(a.width > 0.0) || !(a.height > 0.0)) throw FormatError("anchor sizes must be positive");
    }
  }
}

RawLayerOutput RawLayerOutput::zeros(int layer_index, int stride, int num_anchors, int grid, int channels) {
  RawLayerOutput raw;
  raw.layer_index = layer_index;
  raw.stride = stride;
  raw.num_anchors = num_anchors;
  raw.grid_h = grid;
  raw.grid_w = grid;
  raw.channels = channels;
  raw.values.assign(raw.expected_size(), 0.0f);
  return raw;
}

void DecodeConfig::validate() const {
  if (!(confidence_threshold > 0.0 && confidence_threshold < 1.0)) {
    throw ConfigError("confidence threshold must lie in (0,1)");
  }
  if (!(nms_iou_threshold > 0.0 && nms_iou_threshold < 1.0)) {
    throw ConfigError("NMS IoU threshold must lie in (0,1)");
  }
  if (max_detections == 0) throw ConfigError("max detections must be positive");
  if (target_size <= 0) throw ConfigError("target size must be positive");
  if (registry.size() == 0) throw ConfigError("class registry is empty");
}

double sigmoid(double x) noexcept { return 1.0 / (1.0 + std::exp(-x)); }

void validate_layer(const RawLayerOutput& raw, const AnchorSet& anchors, const DecodeConfig& cfg) {
  const std::string where = "layer " + std::to_string(raw.layer_index) + ": ";
  if (raw.layer_index < 0 || static_cast<std::size_t>(raw.layer_index) >= anchors.layers.size()) {
    throw FormatError(where + "no anchor layer with this index");
  }
  const AnchorLayer& layer = anchors.layers[static_cast<std::size_t>(raw.layer_index)];
  if (raw.stride != layer.stride) {
    throw FormatError(where + "stride " + std::to_string(raw.stride) + " does not match anchor stride " +
                      std::to_string(layer.stride));
  }
  if (raw.num_anchors != static_cast<int>(layer.anchors.size())) {
    throw FormatError(where + "tensor has " + std::to_string(raw.num_anchors) + " anchors, metadata has " +
                      std::to_string(layer.anchors.size()));
  }
  if (cfg.target_size % raw.stride != 0 || raw.grid_h != cfg.target_size / raw.stride ||
      raw.grid_w != cfg.target_size / raw.stride) {
    throw FormatError(where + "grid " + std::to_string(raw.grid_h) + "x" + std::to_string(raw.grid_w) +
                      " does not match target size " + std::to_string(cfg.target_size) + " / stride " +
                      std::to_string(raw.stride));
  }
  if (raw.channels != 5 + cfg.registry.size()) {
    throw FormatError(where + "channels " + std::to_string(raw.channels) + " != 5 + " +
                      std::to_string(cfg.registry.size()) + " classes");
  }
  if (raw.values.size() != raw.expected_size()) {
    throw FormatError(where + "holds " + std::to_string(raw.values.size()) + " values, expected " +
                      std::to_string(raw.expected_size()));
  }
}

std::vector<Detection> decode_layer(const RawLayerOutput& raw, const AnchorSet& anchors, const DecodeConfig& cfg) {
  validate_layer(raw, anchors, cfg);
  const AnchorLayer& layer = anchors.layers[static_cast<std::size_t>(raw.layer_index)];
  const int rows = raw.num_anchors * raw.grid_h;

  std::vector<std::vector<Detection>> per_row(static_cast<std::size_t>(rows));
#pragma omp parallel for schedule(static)
  for (int r = 0; r < rows; ++r) {
    const int a = r / raw.grid_h;
    const int gy = r % raw.grid_h;
    auto& out = per_row[static_cast<std::size_t>(r)];
    for (int gx = 0; gx < raw.grid_w; ++gx) {
      detail::decode_cell(raw, layer.anchors[static_cast<std::size_t>(a)], cfg, a, gy, gx, out);
    }
  }

  std::size_t total = 0;
  for (const auto& v : per_row) total += v.size();
  std::vector<Detection> result;
  result.reserve(total);
  for (auto& v : per_row) result.insert(result.end(), v.begin(), v.end());
  return result;
}

double iou(const Box& a, const Box& b) noexcept {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
  const double uni = a.area() + b.area() - inter;
  if (!(uni > 0.0)) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

std::vector<Detection> nms(std::vector<Detection> candidates, const DecodeConfig& cfg) {
  std::stable_sort(candidates.begin(), candidates.end(), [](const Detection& a, const Detection& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.class_id != b.class_id) return a.class_id < b.class_id;
    return a.box.x1 < b.box.x1;
  });

  std::vector<Detection> kept;
  // Kept boxes grouped by class so suppression only scans same-class boxes.
  std::vector<std::pair<int, std::vector<Box>>> by_class;
  for (const Detection& cand : candidates) {
    if (kept.size() >= cfg.max_detections) break;
    auto it = std::find_if(by_class.begin(), by_class.end(),
                           [&](const auto& entry) { return entry.first == cand.class_id; });
    if (it == by_class.end()) {
      by_class.emplace_back(cand.class_id, std::vector<Box>{});
      it = std::prev(by_class.end());
    }
    const bool suppressed = std::any_of(it->second.begin(), it->second.end(), [&](const Box& k) {
      return iou(k, cand.box) >= cfg.nms_iou_threshold;
    });
    if (suppressed) continue;
    it->second.push_back(cand.box);
    kept.push_back(cand);
  }
  return kept;
}

std::vector<Detection> decode_frame(std::span<const RawLayerOutput> layers, const AnchorSet& anchors,
                                    const DecodeConfig& cfg, const LetterboxTransform& transform, int orig_w,
                                    int orig_h) {
  std::vector<const RawLayerOutput*> ordered(anchors.layers.size(), nullptr);
  for (const RawLayerOutput& raw : layers) {
    if (raw.layer_index < 0 || static_cast<std::size_t>(raw.layer_index) >= ordered.size()) {
      throw FormatError("tensor layer index " + std::to_string(raw.layer_index) + " has no anchor layer");
    }
    if (ordered[static_cast<std::size_t>(raw.layer_index)] != nullptr) {
      throw FormatError("duplicate tensor layer " + std::to_string(raw.layer_index));
    }
    ordered[static_cast<std::size_t>(raw.layer_index)] = &raw;
  }
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    if (ordered[i] == nullptr) {
      throw FormatError("missing tensor layer " + std::to_string(i) + " (stride " +
                        std::to_string(anchors.layers[i].stride) + ")");
    }
  }

  std::vector<Detection> candidates;
  for (const RawLayerOutput* raw : ordered) {
    auto part = decode_layer(*raw, anchors, cfg);
    candidates.insert(candidates.end(), part.begin(), part.end());
  }
  std::vector<Detection> kept = nms(std::move(candidates), cfg);
  for (Detection& d : kept) d.box = unmap_box(d.box, transform, orig_w, orig_h);
  return kept;
}

}  // namespace distwatch
