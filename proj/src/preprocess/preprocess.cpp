#include "distwatch/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "common/text.hpp"
#include "distwatch/errors.hpp"
#include "preprocess/resize_kernels.hpp"

namespace distwatch {

namespace fs = std::filesystem;

LetterboxTransform letterbox_transform(int width, int height, int target_size) {
  if (target_size <= 0) throw ConfigError("letterbox target size must be positive");
  if (width <= 0 || height <= 0) throw FormatError("frame dimensions must be positive");

  LetterboxTransform t;
  t.target_size = target_size;
  t.scale = std::min(static_cast<double>(target_size) / width, static_cast<double>(target_size) / height);
  t.content_width = std::clamp(static_cast<int>(std::lround(width * t.scale)), 1, target_size);
  t.content_height = std::clamp(static_cast<int>(std::lround(height * t.scale)), 1, target_size);
  t.pad_left = (target_size - t.content_width) / 2;
  t.pad_top = (target_size - t.content_height) / 2;
  return t;
}

std::pair<Image, LetterboxTransform> letterbox(const Image& frame, const LetterboxOptions& options) {
  const LetterboxTransform t = letterbox_transform(frame.width(), frame.height(), options.target_size);
  Image out(options.target_size, options.target_size);
#pragma omp parallel for schedule(static)
  for (int dy = 0; dy < options.target_size; ++dy) {
    detail::letterbox_row(frame, out, t, options.resample, options.pad_value, dy);
  }
  return {std::move(out), t};
}

Box map_box(const Box& box, const LetterboxTransform& t) {
  return {box.x1 * t.scale + t.pad_left, box.y1 * t.scale + t.pad_top, box.x2 * t.scale + t.pad_left,
          box.y2 * t.scale + t.pad_top};
}

Box unmap_box(const Box& box, const LetterboxTransform& t, int orig_w, int orig_h) {
  const Box raw{(box.x1 - t.pad_left) / t.scale, (box.y1 - t.pad_top) / t.scale,
                (box.x2 - t.pad_left) / t.scale, (box.y2 - t.pad_top) / t.scale};
  return clip_box(raw, orig_w, orig_h);
}

// FrameSource

FrameSource::FrameSource(FrameSource&&) noexcept = default;
FrameSource& FrameSource::operator=(FrameSource&&) noexcept = default;
FrameSource::~FrameSource() = default;

FrameSource FrameSource::open(const fs::path& source, std::optional<FrameDims> expected_dims) {
  FrameSource src;
  src.expected_ = expected_dims;
  std::error_code ec;
  if (fs::is_directory(source, ec)) {
    for (const auto& entry : fs::directory_iterator(source)) {
      if (entry.is_regular_file()) src.files_.push_back(entry.path());
    }
    std::sort(src.files_.begin(), src.files_.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
    return src;
  }
  if (!fs::is_regular_file(source, ec)) throw FormatError("frame source not found: " + source.string());

  auto in = std::make_unique<std::ifstream>(source, std::ios::binary);
  if (!*in) throw FormatError("cannot open frame stream " + source.string());
  std::string header;
  std::getline(*in, header);
  const auto fields = text::split_ws(header);
  if (fields.size() != 4 || fields[0] != "RAWV1") {
    throw FormatError(source.string() + ": expected header 'RAWV1 <width> <height> <channels>'");
  }
  const auto w = text::parse_number<int>(fields[1]);
  const auto h = text::parse_number<int>(fields[2]);
  const auto c = text::parse_number<int>(fields[3]);
  if (!w || !h || !c || *w <= 0 || *h <= 0) throw FormatError(source.string() + ": bad RAWV1 dimensions");
  if (*c != 3) throw FormatError(source.string() + ": only 3-channel RGB streams are supported");
  src.raw_dims_ = {*w, *h};
  if (expected_dims && *expected_dims != src.raw_dims_) {
    throw FormatError(source.string() + ": stream is " + std::to_string(*w) + "x" + std::to_string(*h) +
                      ", expected " + std::to_string(expected_dims->width) + "x" +
                      std::to_string(expected_dims->height));
  }
  const auto header_bytes = static_cast<std::uintmax_t>(header.size() + 1);
  const std::uintmax_t total = fs::file_size(source);
  const std::uintmax_t payload = total >= header_bytes ? total - header_bytes : 0;
  const std::uintmax_t frame_bytes = static_cast<std::uintmax_t>(*w) * *h * 3;
  if (payload % frame_bytes != 0) {
    throw FormatError(source.string() + ": payload of " + std::to_string(payload) +
                      " bytes is not a multiple of the frame size " + std::to_string(frame_bytes));
  }
  src.raw_frames_left_ = static_cast<std::size_t>(payload / frame_bytes);
  src.raw_ = std::move(in);
  return src;
}

std::size_t FrameSource::remaining_hint() const noexcept {
  return raw_ ? raw_frames_left_ : files_.size() - next_file_;
}

std::optional<Frame> FrameSource::next() {
  if (raw_) {
    if (raw_frames_left_ == 0) return std::nullopt;
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(raw_dims_.width) * raw_dims_.height * 3);
    raw_->read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!*raw_) throw FormatError("frame stream truncated");
    --raw_frames_left_;
    return Frame{next_index_++, Image::from_bytes(raw_dims_.width, raw_dims_.height, std::move(bytes))};
  }
  while (next_file_ < files_.size()) {
    const fs::path& path = files_[next_file_++];
    try {
      Image img = read_ppm(path);
      if (expected_ && (img.width() != expected_->width || img.height() != expected_->height)) {
        throw FormatError(path.string() + ": unexpected dimensions " + std::to_string(img.width()) + "x" +
                          std::to_string(img.height()));
      }
      return Frame{next_index_++, std::move(img)};
    } catch (const FormatError& e) {
      errors_.push_back({path.string(), e.what()});
    }
  }
  return std::nullopt;
}

IngestResult ingest_frames(const fs::path& source, std::optional<FrameDims> expected_dims) {
  FrameSource src = FrameSource::open(source, expected_dims);
  IngestResult result;
  while (auto frame = src.next()) result.frames.push_back(std::move(*frame));
  result.errors = src.errors();
  return result;
}

void write_raw_stream(const fs::path& path, const std::vector<Image>& frames) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write frame stream " + path.string());
  const int w = frames.empty() ? 1 : frames.front().width();
  const int h = frames.empty() ? 1 : frames.front().height();
  out << "RAWV1 " << w << ' ' << h << " 3\n";
  for (const Image& f : frames) {
    if (f.width() != w || f.height() != h) throw FormatError("raw stream frames must share dimensions");
    out.write(reinterpret_cast<const char*>(f.pixels().data()), static_cast<std::streamsize>(f.pixels().size()));
  }
}

}  // namespace distwatch
