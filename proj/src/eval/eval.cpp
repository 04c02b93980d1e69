#include "distwatch/eval.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <string>

#include "common/text.hpp"
#include "distwatch/decode.hpp"
#include "distwatch/errors.hpp"

namespace distwatch {

namespace fs = std::filesystem;

// Visdrone devkit categories: 0 ignored region, 1..10 object classes, 11 others.
std::vector<GroundTruthRecord> parse_visdrone(std::istream& in, const std::string& image_id,
                                              const ClassRegistry& registry, const fs::path& origin) {
  std::vector<GroundTruthRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view s = text::trim(line);
    if (s.empty()) continue;
    auto fields = text::split(s, ',');
    if (fields.size() == 9 && text::trim(fields.back()).empty()) fields.pop_back();
    if (fields.size() != 8) {
      throw ParseError(origin, line_no, "expected 8 comma-separated integers, got " + std::to_string(fields.size()));
    }
    long v[8];
    for (std::size_t k = 0; k < 8; ++k) {
      const auto parsed = text::parse_number<long>(fields[k]);
      if (!parsed) throw ParseError(origin, line_no, "field " + std::to_string(k + 1) + " is not an integer");
      v[k] = *parsed;
    }
    const long left = v[0], top = v[1], width = v[2], height = v[3], score = v[4], category = v[5];
    if (width < 0 || height < 0) throw ParseError(origin, line_no, "negative box size");
    if (category < 0 || category > 11) throw ParseError(origin, line_no, "category out of range 0..11");

    GroundTruthRecord rec;
    rec.image_id = image_id;
    rec.box = {static_cast<double>(left), static_cast<double>(top), static_cast<double>(left + width),
               static_cast<double>(top + height)};
    if (category >= 1 && category <= 10) {
      rec.class_id = static_cast<int>(category - 1);
      if (!registry.contains(rec.class_id)) throw ParseError(origin, line_no, "category not in class registry");
    }
    rec.ignore = category == 0 || category == 11 || score == 0;
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<GroundTruthRecord> read_visdrone_file(const fs::path& path, const ClassRegistry& registry) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open annotation file " + path.string());
  return parse_visdrone(in, path.stem().string(), registry, path);
}

AnnotationSet read_visdrone_dir(const fs::path& dir, const ClassRegistry& registry) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw ConfigError("annotation directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  AnnotationSet set;
  for (const fs::path& f : files) {
    set.image_ids.push_back(f.stem().string());
    set.per_image.push_back(read_visdrone_file(f, registry));
  }
  return set;
}

namespace {

/// Intersection over the detection's own area.
double intersection_over_det(const Box& det, const Box& region) noexcept {
  const double iw = std::min(det.x2, region.x2) - std::max(det.x1, region.x1);
  const double ih = std::min(det.y2, region.y2) - std::max(det.y1, region.y1);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double area = det.area();
  return area > 0.0 ? (iw * ih) / area : 0.0;
}

std::vector<std::size_t> confidence_order(std::span<const Detection> dets) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].confidence > dets[b].confidence; });
  return order;
}

}  // namespace

MatchResult match_detections(std::span<const Detection> dets, std::span<const GroundTruthRecord> gts,
                             double iou_threshold) {
  MatchResult r;
  r.labels.assign(dets.size(), MatchLabel::FalsePositive);
  r.gt_matched.assign(gts.size(), false);
  r.num_gt = static_cast<std::size_t>(std::count_if(gts.begin(), gts.end(), [](const auto& g) { return !g.ignore; }));

  for (std::size_t d : confidence_order(dets)) {
    const Box& box = dets[d].box;
    std::ptrdiff_t best = -1;
    double best_iou = 0.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (gts[g].ignore || r.gt_matched[g]) continue;
      const double o = iou(box, gts[g].box);
      if (o >= iou_threshold && (best < 0 || o > best_iou)) {
        best = static_cast<std::ptrdiff_t>(g);
        best_iou = o;
      }
    }
    if (best >= 0) {
      r.gt_matched[static_cast<std::size_t>(best)] = true;
      r.labels[d] = MatchLabel::TruePositive;
      continue;
    }
    for (const GroundTruthRecord& g : gts) {
      if (g.ignore && intersection_over_det(box, g.box) >= iou_threshold) {
        r.labels[d] = MatchLabel::Ignored;
        break;
      }
    }
  }
  return r;
}

double average_precision(std::span<const ScoredLabel> labels, std::size_t num_gt) {
  if (num_gt == 0 || labels.empty()) return 0.0;
  std::vector<ScoredLabel> sorted(labels.begin(), labels.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ScoredLabel& a, const ScoredLabel& b) { return a.confidence > b.confidence; });

  const std::size_t n = sorted.size();
  std::vector<double> recall(n), precision(n);
  std::size_t tp = 0, fp = 0;
  for (std::size_t k = 0; k < n; ++k) {
    (sorted[k].true_positive ? tp : fp) += 1;
    recall[k] = static_cast<double>(tp) / static_cast<double>(num_gt);
    precision[k] = static_cast<double>(tp) / static_cast<double>(tp + fp);
  }
  // Precision envelope: best precision at any recall at least this high.
  for (std::size_t k = n - 1; k > 0; --k) precision[k - 1] = std::max(precision[k - 1], precision[k]);

  double sum = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double r = i / 100.0;
    const auto it = std::lower_bound(recall.begin(), recall.end(), r);
    if (it != recall.end()) sum += precision[static_cast<std::size_t>(it - recall.begin())];
  }
  return sum / 101.0;
}

double iou_threshold_at(int k) noexcept { return (50 + 5 * k) / 100.0; }

namespace {

/// Detections and ground truth of one class in one image. Class-less ignored
/// regions are copied into every class.
struct ClassSlice {
  std::vector<Detection> dets;
  std::vector<GroundTruthRecord> gts;
};

std::vector<std::vector<ClassSlice>> slice_by_class(std::span<const ImageDetections> dets, const AnnotationSet& gts,
                                                    int num_classes, double min_confidence) {
  const std::size_t images = gts.per_image.size();
  std::vector<std::vector<ClassSlice>> slices(images, std::vector<ClassSlice>(static_cast<std::size_t>(num_classes)));
  for (std::size_t img = 0; img < images; ++img) {
    for (const GroundTruthRecord& g : gts.per_image[img]) {
      if (g.class_id < 0) {
        for (auto& s : slices[img]) s.gts.push_back(g);
      } else if (g.class_id < num_classes) {
        slices[img][static_cast<std::size_t>(g.class_id)].gts.push_back(g);
      }
    }
    if (img < dets.size()) {
      for (const Detection& d : dets[img].detections) {
        if (d.class_id >= 0 && d.class_id < num_classes && d.confidence >= min_confidence) {
          slices[img][static_cast<std::size_t>(d.class_id)].dets.push_back(d);
        }
      }
    }
  }
  return slices;
}

ClassAccumulator accumulate(const std::vector<std::vector<ClassSlice>>& slices, int class_id, double iou_threshold) {
  ClassAccumulator acc;
  for (const auto& image : slices) {
    const ClassSlice& s = image[static_cast<std::size_t>(class_id)];
    const MatchResult m = match_detections(s.dets, s.gts, iou_threshold);
    acc.num_gt += m.num_gt;
    for (std::size_t d = 0; d < s.dets.size(); ++d) {
      if (m.labels[d] == MatchLabel::Ignored) continue;
      acc.labels.push_back({s.dets[d].confidence, m.labels[d] == MatchLabel::TruePositive});
    }
  }
  return acc;
}

struct Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t num_gt = 0;
};

Counts count_at(const std::vector<std::vector<ClassSlice>>& slices, int class_id) {
  const ClassAccumulator acc = accumulate(slices, class_id, iou_threshold_at(0));
  Counts c;
  c.num_gt = acc.num_gt;
  for (const ScoredLabel& l : acc.labels) (l.true_positive ? c.tp : c.fp) += 1;
  return c;
}

PrPoint to_pr(const Counts& c) {
  PrPoint p;
  if (c.tp + c.fp == 0) {
    p.precision_defined = false;
  } else {
    p.precision = 100.0 * static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  }
  if (c.num_gt == 0) {
    p.recall_defined = false;
  } else {
    p.recall = 100.0 * static_cast<double>(c.tp) / static_cast<double>(c.num_gt);
  }
  return p;
}

int class_count_for(std::span<const ImageDetections> dets, const AnnotationSet& gts) {
  int n = 0;
  for (const auto& image : gts.per_image) {
    for (const auto& g : image) n = std::max(n, g.class_id + 1);
  }
  for (const auto& image : dets) {
    for (const auto& d : image.detections) n = std::max(n, d.class_id + 1);
  }
  return n;
}

}  // namespace

PrPoint pr_point(std::span<const ImageDetections> dets, const AnnotationSet& gts, int class_id,
                 double confidence_cutoff) {
  const int num_classes = std::max(class_count_for(dets, gts), class_id + 1);
  const auto slices = slice_by_class(dets, gts, num_classes, confidence_cutoff);
  Counts total;
  for (int c = 0; c < num_classes; ++c) {
    if (class_id >= 0 && c != class_id) continue;
    const Counts k = count_at(slices, c);
    total.tp += k.tp;
    total.fp += k.fp;
    total.num_gt += k.num_gt;
  }
  return to_pr(total);
}

EvalResult map_range(std::span<const ImageDetections> dets, const AnnotationSet& gts, const ClassRegistry& registry,
                     const EvalOptions& options) {
  const int nc = registry.size();
  const auto all = slice_by_class(dets, gts, nc, 0.0);
  const auto cut = slice_by_class(dets, gts, nc, options.confidence_cutoff);

  const int tasks = nc * kIouThresholdCount;
  std::vector<double> ap(static_cast<std::size_t>(tasks), 0.0);
  std::vector<std::size_t> num_gt(static_cast<std::size_t>(nc), 0);
#pragma omp parallel for schedule(dynamic, 1)
  for (int task = 0; task < tasks; ++task) {
    const int c = task / kIouThresholdCount;
    const int k = task % kIouThresholdCount;
    const ClassAccumulator acc = accumulate(all, c, iou_threshold_at(k));
    ap[static_cast<std::size_t>(task)] = average_precision(acc.labels, acc.num_gt);
    if (k == 0) num_gt[static_cast<std::size_t>(c)] = acc.num_gt;
  }

  EvalResult result;
  result.class_present.assign(static_cast<std::size_t>(nc), false);
  ClassMetrics mean{"All"};
  int present = 0;
  std::vector<ClassMetrics> rows;
  for (int c = 0; c < nc; ++c) {
    ClassMetrics m;
    m.class_name = registry.class_names[static_cast<std::size_t>(c)];
    const PrPoint pr = to_pr(count_at(cut, c));
    m.precision = pr.precision;
    m.recall = pr.recall;
    double sum = 0.0;
    for (int k = 0; k < kIouThresholdCount; ++k) sum += ap[static_cast<std::size_t>(c * kIouThresholdCount + k)];
    m.map_50_95 = 100.0 * sum / kIouThresholdCount;
    m.map_50 = 100.0 * ap[static_cast<std::size_t>(c * kIouThresholdCount)];
    rows.push_back(m);

    if (num_gt[static_cast<std::size_t>(c)] > 0) {
      result.class_present[static_cast<std::size_t>(c)] = true;
      ++present;
      mean.precision += m.precision;
      mean.recall += m.recall;
      mean.map_50_95 += m.map_50_95;
      mean.map_50 += m.map_50;
    }
  }
  if (present > 0) {
    mean.precision /= present;
    mean.recall /= present;
    mean.map_50_95 /= present;
    mean.map_50 /= present;
  }
  result.rows.push_back(mean);
  result.rows.insert(result.rows.end(), rows.begin(), rows.end());
  return result;
}

std::vector<ImageDetections> align_detections(std::span<const DetectionFileRecord> records, std::size_t image_count) {
  std::vector<ImageDetections> out(image_count);
  for (const DetectionFileRecord& r : records) {
    if (r.frame_index >= image_count) {
      throw FormatError("detection record for frame " + std::to_string(r.frame_index) + " but only " +
                        std::to_string(image_count) + " annotated images");
    }
    out[static_cast<std::size_t>(r.frame_index)].detections = r.detections;
  }
  return out;
}

}  // namespace distwatch
