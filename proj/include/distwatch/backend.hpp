#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "distwatch/decode.hpp"
#include "distwatch/detection_file.hpp"
#include "distwatch/image.hpp"
#include "distwatch/preprocess.hpp"

namespace distwatch {

enum class BackendKind { Model, RawTensorFile, DetectionFile };

/// "model", "raw-tensor-file", "detection-file". Throws ConfigError.
BackendKind parse_backend_kind(std::string_view text);
std::string_view to_string(BackendKind kind) noexcept;

struct FrameInfo {
  std::uint64_t index = 0;
  int width = 0;
  int height = 0;
};

/// Source of per-frame detections in original-image coordinates.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual BackendKind kind() const noexcept = 0;

  /// Frames the backend can serve without a frame source, when known.
  virtual std::optional<std::size_t> available_frames() const { return std::nullopt; }

  /// Indices served without a frame source, in order.
  virtual std::vector<std::uint64_t> frame_indices() const { return {}; }

  /// Whether detections_for may be called concurrently on this handle.
  virtual bool concurrent() const noexcept { return false; }

  /// `pixels` may be null for kinds that do not need them.
  virtual std::vector<Detection> detections_for(const FrameInfo& frame, const Image* pixels) = 0;
};

/// Serves stored records verbatim.
class DetectionFileBackend final : public Backend {
 public:
  explicit DetectionFileBackend(std::vector<DetectionFileRecord> records);

  BackendKind kind() const noexcept override { return BackendKind::DetectionFile; }
  std::optional<std::size_t> available_frames() const override { return records_.size(); }
  std::vector<std::uint64_t> frame_indices() const override;
  bool concurrent() const noexcept override { return true; }

  /// Throws NoDetectionsRecorded when the index has no record.
  std::vector<Detection> detections_for(const FrameInfo& frame, const Image* pixels) override;

 private:
  std::vector<DetectionFileRecord> records_;
  std::map<std::uint64_t, std::size_t> by_index_;
};

/// Directory of `.tens` TENSV1 files (or a single file of any name); the
/// n-th file in lexicographic order holds frame n's head outputs.
class RawTensorBackend final : public Backend {
 public:
  RawTensorBackend(const std::filesystem::path& path, DecodeConfig cfg, AnchorSet anchors);

  BackendKind kind() const noexcept override { return BackendKind::RawTensorFile; }
  std::optional<std::size_t> available_frames() const override { return files_.size(); }
  std::vector<std::uint64_t> frame_indices() const override;
  bool concurrent() const noexcept override { return true; }

  /// Frame dims select the letterbox inverse; pixels are unused.
  std::vector<Detection> detections_for(const FrameInfo& frame, const Image* pixels) override;

  const std::vector<std::filesystem::path>& files() const noexcept { return files_; }

 private:
  std::vector<std::filesystem::path> files_;
  DecodeConfig cfg_;
  AnchorSet anchors_;
};

/// Tensor shape as reported by an inference runtime (NCHW input, per-head output).
using TensorShape = std::vector<std::int64_t>;

/// Input must be [1,3,T,T] (or [1,T,T,3]). Each output must be
/// [1, anchors, T/stride, T/stride, 5+nc] for the matching anchor layer, and
/// there must be 3 or 4 of them, one per anchor layer. Throws FormatError.
void validate_model_io(const TensorShape& input, const std::vector<TensorShape>& outputs,
                       const AnchorSet& anchors, const DecodeConfig& cfg);

/// True when the build includes the ONNX model backend.
bool model_backend_available() noexcept;

/// Opens a backend. Tensor-producing kinds require anchors (ConfigError).
std::unique_ptr<Backend> open_backend(BackendKind kind, const std::filesystem::path& path,
                                      const DecodeConfig& cfg, std::optional<AnchorSet> anchors);

}  // namespace distwatch
