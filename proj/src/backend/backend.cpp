#include "distwatch/backend.hpp"

#include <algorithm>
#include <fstream>
#include <string>

#include "backend/model_backend.hpp"
#include "common/text.hpp"
#include "distwatch/errors.hpp"

namespace distwatch {

namespace fs = std::filesystem;

BackendKind parse_backend_kind(std::string_view text) {
  if (text == "model") return BackendKind::Model;
  if (text == "raw-tensor-file") return BackendKind::RawTensorFile;
  if (text == "detection-file") return BackendKind::DetectionFile;
  throw ConfigError("unknown backend '" + std::string(text) + "' (expected model, raw-tensor-file or detection-file)");
}

std::string_view to_string(BackendKind kind) noexcept {
  switch (kind) {
    case BackendKind::Model: return "model";
    case BackendKind::RawTensorFile: return "raw-tensor-file";
    case BackendKind::DetectionFile: return "detection-file";
  }
  return "?";
}

DetectionFileBackend::DetectionFileBackend(std::vector<DetectionFileRecord> records) : records_(std::move(records)) {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (!by_index_.emplace(records_[i].frame_index, i).second) {
      throw FormatError("duplicate detection record for frame " + std::to_string(records_[i].frame_index));
    }
  }
}

std::vector<std::uint64_t> DetectionFileBackend::frame_indices() const {
  std::vector<std::uint64_t> out;
  out.reserve(by_index_.size());
  for (const auto& [index, pos] : by_index_) out.push_back(index);
  return out;
}

std::vector<Detection> DetectionFileBackend::detections_for(const FrameInfo& frame, const Image*) {
  const auto it = by_index_.find(frame.index);
  if (it == by_index_.end()) throw NoDetectionsRecorded(frame.index);
  return records_[it->second].detections;
}

namespace {

std::size_t tensor_header_layers(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::string line;
  if (!in || !std::getline(in, line)) throw FormatError("cannot read tensor file " + file.string());
  const auto f = text::split_ws(line);
  const auto n = f.size() == 2 && f[0] == "TENSV1" ? text::parse_number<std::size_t>(f[1]) : std::nullopt;
  if (!n) throw ParseError(file, 1, "expected 'TENSV1 <n_layers>'");
  return *n;
}

}  // namespace

RawTensorBackend::RawTensorBackend(const fs::path& path, DecodeConfig cfg, AnchorSet anchors)
    : cfg_(std::move(cfg)), anchors_(std::move(anchors)) {
  cfg_.validate();
  anchors_.validate();
  std::error_code ec;
  if (fs::is_directory(path, ec)) {
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".tens") files_.push_back(entry.path());
    }
    std::sort(files_.begin(), files_.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  } else if (fs::is_regular_file(path, ec)) {
    files_.push_back(path);
  } else {
    throw FormatError("tensor source not found: " + path.string());
  }
  for (const fs::path& f : files_) {
    const std::size_t n = tensor_header_layers(f);
    if (n != anchors_.layers.size()) {
      throw FormatError(f.string() + ": header declares " + std::to_string(n) + " layers but the anchor set has " +
                        std::to_string(anchors_.layers.size()));
    }
  }
}

std::vector<std::uint64_t> RawTensorBackend::frame_indices() const {
  std::vector<std::uint64_t> out(files_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
  return out;
}

std::vector<Detection> RawTensorBackend::detections_for(const FrameInfo& frame, const Image*) {
  if (frame.index >= files_.size()) throw NoDetectionsRecorded(frame.index);
  const auto layers = read_tensor_file(files_[static_cast<std::size_t>(frame.index)]);
  const int w = frame.width > 0 ? frame.width : cfg_.target_size;
  const int h = frame.height > 0 ? frame.height : cfg_.target_size;
  const LetterboxTransform t = letterbox_transform(w, h, cfg_.target_size);
  return decode_frame(layers, anchors_, cfg_, t, w, h);
}

void validate_model_io(const TensorShape& input, const std::vector<TensorShape>& outputs, const AnchorSet& anchors,
                       const DecodeConfig& cfg) {
  const std::int64_t t = cfg.target_size;
  const bool nchw = input == TensorShape{1, 3, t, t};
  const bool nhwc = input == TensorShape{1, t, t, 3};
  if (!nchw && !nhwc) {
    std::string dims;
    for (auto d : input) dims += (dims.empty() ? "" : "x") + std::to_string(d);
    throw FormatError("model input shape " + dims + " is not " + std::to_string(t) + "x" + std::to_string(t) + "x3");
  }
  if (outputs.size() != 3 && outputs.size() != 4) {
    throw FormatError("model has " + std::to_string(outputs.size()) + " output layers, expected 3 or 4");
  }
  if (outputs.size() != anchors.layers.size()) {
    throw FormatError("model has " + std::to_string(outputs.size()) + " output layers but the anchor set has " +
                      std::to_string(anchors.layers.size()));
  }
  std::vector<bool> seen(anchors.layers.size(), false);
  for (const TensorShape& out : outputs) {
    if (out.size() != 5 || out[0] != 1 || out[2] != out[3]) {
      throw FormatError("model output must be [1, anchors, grid, grid, 5+classes]");
    }
    bool matched = false;
    for (std::size_t l = 0; l < anchors.layers.size(); ++l) {
      const AnchorLayer& layer = anchors.layers[l];
      if (out[2] != t / layer.stride || seen[l]) continue;
      if (out[1] != static_cast<std::int64_t>(layer.anchors.size())) {
        throw FormatError("output for stride " + std::to_string(layer.stride) + " has " + std::to_string(out[1]) +
                          " anchors, metadata has " + std::to_string(layer.anchors.size()));
      }
      if (out[4] != 5 + cfg.registry.size()) {
        throw FormatError("output for stride " + std::to_string(layer.stride) + " has " + std::to_string(out[4]) +
                          " channels, expected " + std::to_string(5 + cfg.registry.size()));
      }
      seen[l] = true;
      matched = true;
      break;
    }
    if (!matched) throw FormatError("model output grid " + std::to_string(out[2]) + " matches no anchor stride");
  }
}

std::unique_ptr<Backend> open_backend(BackendKind kind, const fs::path& path, const DecodeConfig& cfg,
                                      std::optional<AnchorSet> anchors) {
  switch (kind) {
    case BackendKind::DetectionFile:
      return std::make_unique<DetectionFileBackend>(read_detection_file(path));
    case BackendKind::RawTensorFile:
      if (!anchors) throw ConfigError("the raw-tensor-file backend requires anchors (--anchors)");
      return std::make_unique<RawTensorBackend>(path, cfg, std::move(*anchors));
    case BackendKind::Model:
      if (!anchors) throw ConfigError("the model backend requires anchors (--anchors)");
      cfg.validate();
      anchors->validate();
      return detail::open_model_backend(path, cfg, *anchors);
  }
  throw ConfigError("unknown backend kind");
}

}  // namespace distwatch
