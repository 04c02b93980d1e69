#include "distwatch/detection_file.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <string>

#include "common/text.hpp"
#include "distwatch/errors.hpp"

namespace distwatch {

std::vector<DetectionFileRecord> parse_detection_file(std::istream& in, const std::filesystem::path& origin) {
  std::vector<DetectionFileRecord> records;
  std::string line;
  std::size_t line_no = 0;

  auto next_content_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!text::trim(line).empty()) return true;
    }
    return false;
  };

  while (next_content_line()) {
    const auto head = text::split_ws(line);
    if (head.size() != 2 || !text::starts_with(head[0], "frame=") || !text::starts_with(head[1], "dets=")) {
      throw ParseError(origin, line_no, "expected 'frame=<n> dets=<k>'");
    }
    const auto frame = text::parse_number<std::uint64_t>(head[0].substr(6));
    const auto count = text::parse_number<std::size_t>(head[1].substr(5));
    if (!frame || !count) throw ParseError(origin, line_no, "frame and dets must be non-negative integers");
    if (!records.empty() && *frame <= records.back().frame_index) {
      throw ParseError(origin, line_no, "frame indices must be unique and increasing");
    }

    DetectionFileRecord rec;
    rec.frame_index = *frame;
    rec.detections.reserve(*count);
    for (std::size_t k = 0; k < *count; ++k) {
      if (!next_content_line()) throw ParseError(origin, line_no, "record ends before its " + std::to_string(*count) + " detections");
      const auto f = text::split_ws(line);
      if (f.size() != 6) throw ParseError(origin, line_no, "expected '<class_id> <conf> <x1> <y1> <x2> <y2>'");
      const auto cls = text::parse_number<int>(f[0]);
      const auto conf = text::parse_number<double>(f[1]);
      const auto x1 = text::parse_number<double>(f[2]);
      const auto y1 = text::parse_number<double>(f[3]);
      const auto x2 = text::parse_number<double>(f[4]);
      const auto y2 = text::parse_number<double>(f[5]);
      if (!cls || !conf || !x1 || !y1 || !x2 || !y2) throw ParseError(origin, line_no, "non-numeric detection field");
      if (*cls < 0) throw ParseError(origin, line_no, "negative class id");
      if (!(*conf >= 0.0 && *conf <= 1.0)) throw ParseError(origin, line_no, "confidence outside [0,1]");
      const Box box{*x1, *y1, *x2, *y2};
      if (!box.valid()) throw ParseError(origin, line_no, "box corners are not ordered");
      rec.detections.push_back({*cls, *conf, box});
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<DetectionFileRecord> read_detection_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open detection file " + path.string());
  return parse_detection_file(in, path);
}

void write_detection_record(std::ostream& out, const DetectionFileRecord& record) {
  out << "frame=" << record.frame_index << " dets=" << record.detections.size() << '\n';
  for (const Detection& d : record.detections) {
    out << d.class_id << ' ' << text::shortest(d.confidence) << ' ' << text::shortest(d.box.x1) << ' '
        << text::shortest(d.box.y1) << ' ' << text::shortest(d.box.x2) << ' ' << text::shortest(d.box.y2) << '\n';
  }
}

void write_detection_file(std::ostream& out, std::span<const DetectionFileRecord> records) {
  for (const auto& r : records) write_detection_record(out, r);
}

void write_detection_file(const std::filesystem::path& path, std::span<const DetectionFileRecord> records) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write detection file " + path.string());
  write_detection_file(out, records);
}

std::vector<DetectionFileRecord> make_synthetic_records(const SyntheticSceneOptions& options) {
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> ux(0.0, options.frame_width);
  std::uniform_real_distribution<double> uy(0.0, options.frame_height);
  std::uniform_real_distribution<double> usize(20.0, 120.0);
  std::uniform_real_distribution<double> uconf(0.3, 1.0);

  std::vector<DetectionFileRecord> records(options.frames);
  for (std::size_t f = 0; f < options.frames; ++f) {
    records[f].frame_index = f;
    records[f].detections.reserve(options.persons_per_frame);
    for (std::size_t p = 0; p < options.persons_per_frame; ++p) {
      const double cx = ux(rng);
      const double cy = uy(rng);
      const double w = usize(rng) * 0.5;
      const double h = usize(rng);
      Box b = clip_box({cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2}, options.frame_width, options.frame_height);
      records[f].detections.push_back({options.person_class_id, uconf(rng), b});
    }
  }
  return records;
}

}  // namespace distwatch
