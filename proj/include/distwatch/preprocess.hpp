#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "distwatch/box.hpp"
#include "distwatch/image.hpp"

namespace distwatch {

inline constexpr int kDefaultTargetSize = 640;
inline constexpr std::uint8_t kLetterboxPadValue = 114;

struct FrameDims {
  int width = 0;
  int height = 0;

  friend bool operator==(const FrameDims&, const FrameDims&) = default;
};

struct Frame {
  std::uint64_t index = 0;
  Image image;
};

/// Affine map from original-image to square network-input coordinates:
/// x_in = x * scale + pad_left, y_in = y * scale + pad_top.
struct LetterboxTransform {
  double scale = 1.0;
  int pad_left = 0;
  int pad_top = 0;
  int content_width = 0;
  int content_height = 0;
  int target_size = kDefaultTargetSize;

  friend bool operator==(const LetterboxTransform&, const LetterboxTransform&) = default;
};

enum class Resample { Nearest, Bilinear };

struct LetterboxOptions {
  int target_size = kDefaultTargetSize;
  std::uint8_t pad_value = kLetterboxPadValue;
  Resample resample = Resample::Nearest;
};

/// Geometry only. Odd padding remainders go to the bottom/right.
LetterboxTransform letterbox_transform(int width, int height, int target_size = kDefaultTargetSize);

std::pair<Image, LetterboxTransform> letterbox(const Image& frame, const LetterboxOptions& options = {});

Box map_box(const Box& box, const LetterboxTransform& t);

/// Inverse of map_box, clipped to [0,orig_w]x[0,orig_h].
Box unmap_box(const Box& box, const LetterboxTransform& t, int orig_w, int orig_h);

struct IngestError {
  std::string source;
  std::string message;
};

/// Ordered frames from a directory of images or a RAWV1 stream.
///
/// Directory entries are visited in lexicographic filename order; files that
/// fail to decode are recorded in errors() and skipped without consuming a
/// frame index. A raw stream whose payload is not a whole number of frames is
/// rejected up front with FormatError.
class FrameSource {
 public:
  static FrameSource open(const std::filesystem::path& source,
                          std::optional<FrameDims> expected_dims = std::nullopt);

  FrameSource(FrameSource&&) noexcept;
  FrameSource& operator=(FrameSource&&) noexcept;
  ~FrameSource();

  std::optional<Frame> next();

  const std::vector<IngestError>& errors() const noexcept { return errors_; }

  /// Upper bound on frames still to come (directory: remaining files).
  std::size_t remaining_hint() const noexcept;

 private:
  FrameSource() = default;

  std::vector<std::filesystem::path> files_;
  std::size_t next_file_ = 0;

  std::unique_ptr<std::ifstream> raw_;
  FrameDims raw_dims_{};
  std::size_t raw_frames_left_ = 0;

  std::optional<FrameDims> expected_;
  std::uint64_t next_index_ = 0;
  std::vector<IngestError> errors_;
};

struct IngestResult {
  std::vector<Frame> frames;
  std::vector<IngestError> errors;
};

IngestResult ingest_frames(const std::filesystem::path& source,
                           std::optional<FrameDims> expected_dims = std::nullopt);

/// Writes the RAWV1 header and frames; all frames must share dimensions.
void write_raw_stream(const std::filesystem::path& path, const std::vector<Image>& frames);

}  // namespace distwatch
