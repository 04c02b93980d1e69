#include "distwatch/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "common/text.hpp"
#include "distwatch/backend.hpp"
#include "distwatch/bench.hpp"
#include "distwatch/decode.hpp"
#include "distwatch/errors.hpp"
#include "distwatch/eval.hpp"
#include "distwatch/geometry.hpp"
#include "distwatch/monitor.hpp"
#include "distwatch/parallel.hpp"
#include "distwatch/preprocess.hpp"

namespace distwatch::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kFooter =
    "Exit codes: 0 ok, 1 violations found (--exit-on-violation), 2 configuration error, 3 data/format error.\n"
    "Environment: DISTWATCH_THREADS caps the worker count.";

/// Every flag value in one place; defaults here are the engine defaults.
struct RunConfig {
  std::string backend;
  std::string model;
  std::string tensors;
  std::string detections;
  std::string anchors;
  std::string classes = "coco";
  std::string frames;
  std::string frame_size;
  int target_size = kDefaultTargetSize;
  std::string out;
  double conf = 0.25;
  double nms_iou = 0.45;
  bool multi_label = false;
  std::optional<double> high_below;
  std::optional<double> medium_upper;
  std::optional<double> violation_below;
  std::string calibration;
  bool annotate = false;
  bool exit_on_violation = false;

  std::string annotations;
  std::string metrics;
  std::string model_name = "model";

  long long persons = 50;
  long long bench_frames = 1000;
  std::uint64_t seed = 1;
};

void add_backend_flags(CLI::App& cmd, RunConfig& cfg) {
  cmd.add_option("--backend", cfg.backend, "Detection source: model | raw-tensor-file | detection-file");
  cmd.add_option("--model", cfg.model, "ONNX inference graph (model backend)");
  cmd.add_option("--tensors", cfg.tensors, "TENSV1 file or directory with one file per frame");
  cmd.add_option("--detections", cfg.detections, "Detection file (detection-file backend)");
  cmd.add_option("--anchors", cfg.anchors, "Anchor / model metadata file (required for model and raw-tensor-file)");
  cmd.add_option("--classes", cfg.classes, "Class registry: coco | visdrone")->capture_default_str();
  cmd.add_option("--frames", cfg.frames, "Frame source: image directory (PPM) or RAWV1 stream");
  cmd.add_option("--frame-size", cfg.frame_size, "Original frame size WxH when no frame source is given");
  cmd.add_option("--target-size", cfg.target_size, "Square network input size")->capture_default_str();
  cmd.add_option("--conf", cfg.conf, "Confidence threshold")->capture_default_str();
  cmd.add_option("--nms-iou", cfg.nms_iou, "NMS IoU threshold")->capture_default_str();
  cmd.add_flag("--multi-label", cfg.multi_label, "Keep every class above threshold per anchor cell");
  cmd.add_option("--out", cfg.out, "Output directory (stdout when omitted)");
}

void add_threshold_flags(CLI::App& cmd, RunConfig& cfg) {
  cmd.add_option("--high-below", cfg.high_below, "High risk below this distance (default 200)");
  cmd.add_option("--medium-upper", cfg.medium_upper, "Medium risk up to this distance (default 250)");
  cmd.add_option("--violation-below", cfg.violation_below,
                 "A pair violates when closer than this (default 200, or 50 with a calibration profile)");
  cmd.add_option("--calibration", cfg.calibration, "Calibration profile (key=value)");
}

FrameDims parse_frame_size(const std::string& text, int fallback) {
  if (text.empty()) return {fallback, fallback};
  const auto x = text.find('x');
  const auto w = x == std::string::npos ? std::nullopt : text::parse_number<int>(std::string_view(text).substr(0, x));
  const auto h = x == std::string::npos ? std::nullopt : text::parse_number<int>(std::string_view(text).substr(x + 1));
  if (!w || !h || *w <= 0 || *h <= 0) throw ConfigError("--frame-size must look like 1920x1080");
  return {*w, *h};
}

DecodeConfig decode_config(const RunConfig& cfg) {
  DecodeConfig d;
  d.confidence_threshold = cfg.conf;
  d.nms_iou_threshold = cfg.nms_iou;
  d.multi_label = cfg.multi_label;
  d.target_size = cfg.target_size;
  d.registry = registry_by_name(cfg.classes);
  d.validate();
  return d;
}

MonitorConfig monitor_config(const RunConfig& cfg) {
  MonitorConfig m;
  m.registry = registry_by_name(cfg.classes);
  if (!cfg.calibration.empty()) {
    const CalibrationFile file = read_calibration(cfg.calibration);
    m.calibration = file.profile;
    m.thresholds = file.thresholds;
  }
  if (cfg.high_below) m.thresholds.high_below = *cfg.high_below;
  if (cfg.medium_upper) m.thresholds.medium_upper = *cfg.medium_upper;
  if (cfg.violation_below) m.thresholds.violation_below = *cfg.violation_below;
  m.thresholds.validate();
  return m;
}

struct OpenedBackend {
  std::unique_ptr<Backend> backend;
  BackendKind kind;
};

OpenedBackend open_configured_backend(const RunConfig& cfg, const DecodeConfig& decode, BackendKind fallback) {
  const BackendKind kind = cfg.backend.empty() ? fallback : parse_backend_kind(cfg.backend);
  std::string path;
  const char* flag = "";
  switch (kind) {
    case BackendKind::Model: path = cfg.model; flag = "--model"; break;
    case BackendKind::RawTensorFile: path = cfg.tensors; flag = "--tensors"; break;
    case BackendKind::DetectionFile: path = cfg.detections; flag = "--detections"; break;
  }
  if (path.empty()) throw ConfigError(std::string("backend ") + std::string(to_string(kind)) + " requires " + flag);

  std::optional<AnchorSet> anchors;
  if (kind != BackendKind::DetectionFile) {
    if (cfg.anchors.empty()) throw ConfigError("backend " + std::string(to_string(kind)) + " requires --anchors");
    const ModelMetadata meta = read_model_metadata(cfg.anchors);
    if (!meta.class_names.empty() && static_cast<int>(meta.class_names.size()) != decode.registry.size()) {
      throw FormatError(cfg.anchors + ": lists " + std::to_string(meta.class_names.size()) + " classes but --classes " +
                        cfg.classes + " has " + std::to_string(decode.registry.size()));
    }
    anchors = meta.anchors;
  }
  return {open_backend(kind, path, decode, anchors), kind};
}

/// Writes to <out>/<name> or to `fallback` when no output directory is set.
class OutputSink {
 public:
  OutputSink(const std::string& out_dir, const std::string& name, std::ostream& fallback) {
    if (out_dir.empty()) {
      stream_ = &fallback;
      return;
    }
    fs::create_directories(out_dir);
    file_.open(fs::path(out_dir) / name);
    if (!file_) throw ConfigError("cannot write " + (fs::path(out_dir) / name).string());
    stream_ = &file_;
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

int cmd_detect(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const DecodeConfig decode = decode_config(cfg);
  if (!cfg.backend.empty() && parse_backend_kind(cfg.backend) == BackendKind::DetectionFile) {
    throw ConfigError("detect needs a tensor-producing backend (model or raw-tensor-file)");
  }
  auto [backend, kind] = open_configured_backend(cfg, decode, BackendKind::RawTensorFile);
  if (kind == BackendKind::Model && cfg.frames.empty()) throw ConfigError("the model backend requires --frames");

  OutputSink sink(cfg.out, "detections.txt", out);
  const FrameDims dims = parse_frame_size(cfg.frame_size, cfg.target_size);
  auto emit = [&](const FrameInfo& info, const Image* pixels) {
    try {
      write_detection_record(sink.stream(), {info.index, backend->detections_for(info, pixels)});
    } catch (const NoDetectionsRecorded& e) {
      err << "frame " << info.index << ": " << e.what() << '\n';
    }
  };

  if (!cfg.frames.empty()) {
    FrameSource source = FrameSource::open(cfg.frames);
    while (auto frame = source.next()) {
      emit({frame->index, frame->image.width(), frame->image.height()}, &frame->image);
    }
    for (const auto& e : source.errors()) err << "skipped " << e.source << ": " << e.message << '\n';
  } else {
    for (std::uint64_t index : backend->frame_indices()) emit({index, dims.width, dims.height}, nullptr);
  }
  sink.stream().flush();
  return kExitOk;
}

int cmd_monitor(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const DecodeConfig decode = decode_config(cfg);
  const MonitorConfig monitor = monitor_config(cfg);
  if (cfg.annotate && cfg.frames.empty()) throw ConfigError("--annotate requires --frames");
  if (cfg.annotate && cfg.out.empty()) throw ConfigError("--annotate requires --out");
  auto [backend, kind] = open_configured_backend(cfg, decode, BackendKind::DetectionFile);
  if (kind == BackendKind::Model && cfg.frames.empty()) throw ConfigError("the model backend requires --frames");

  OutputSink report(cfg.out, "report.txt", out);
  SessionSinks sinks;
  sinks.report = &report.stream();
  if (cfg.annotate) sinks.annotate_dir = fs::path(cfg.out);
  sinks.on_error = [&err](const FrameError& e) { err << "frame " << e.frame_index << ": " << e.message << '\n'; };

  SessionStats stats;
  try {
    if (!cfg.frames.empty()) {
      FrameSource source = FrameSource::open(cfg.frames);
      stats = run_session(feed_from_source(source), *backend, monitor, sinks);
      for (const auto& e : source.errors()) err << "skipped " << e.source << ": " << e.message << '\n';
      stats.error_frames += source.errors().size();
    } else {
      const FrameDims dims = parse_frame_size(cfg.frame_size, cfg.target_size);
      stats = run_session(feed_from_indices(backend->frame_indices(), dims), *backend, monitor, sinks);
    }
  } catch (const SessionAborted& e) {
    const SessionStats& s = e.stats();
    out << "frames=" << s.frames << " fps=" << text::fixed(s.fps(), 1) << " violations=" << s.violating_pairs << '\n';
    throw;
  }

  out << "frames=" << stats.frames << " fps=" << text::fixed(stats.fps(), 1) << " violations=" << stats.violating_pairs
      << '\n';
  if (cfg.exit_on_violation && stats.unsafe_frames > 0) return kExitViolations;
  return kExitOk;
}

int cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const ClassRegistry& registry = registry_by_name(cfg.classes);
  BenchmarkTable table;
  if (!cfg.metrics.empty()) {
    std::ifstream in(cfg.metrics);
    if (!in) throw ConfigError("cannot open --metrics file " + cfg.metrics);
    BenchmarkTable parsed = parse_benchmark_sidecar(in, cfg.metrics);
    table = benchmark_table(parsed.model, parsed.rows, registry, parsed.size_pixels);
  } else {
    if (cfg.detections.empty()) throw ConfigError("eval requires --detections (or --metrics)");
    if (cfg.annotations.empty()) throw ConfigError("eval requires --annotations (or --metrics)");
    const AnnotationSet gts = read_visdrone_dir(cfg.annotations, registry);
    const auto records = read_detection_file(cfg.detections);
    const auto dets = align_detections(records, gts.per_image.size());
    EvalOptions options;
    options.confidence_cutoff = cfg.conf;
    const EvalResult result = map_range(dets, gts, registry, options);
    table = benchmark_table(cfg.model_name, result.rows, registry, cfg.target_size);
  }
  if (!cfg.model_name.empty() && cfg.model_name != "model") table.model = cfg.model_name;

  const std::string text_table = format_benchmark_text(table);
  out << text_table;
  if (!cfg.out.empty()) {
    fs::create_directories(cfg.out);
    std::ofstream(fs::path(cfg.out) / "table.txt") << text_table;
    std::ofstream(fs::path(cfg.out) / "metrics.txt") << format_benchmark_sidecar(table);
  }
  return kExitOk;
}

int cmd_bench(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  if (cfg.persons < 0) throw ConfigError("--persons must be non-negative");
  if (cfg.bench_frames <= 0) throw ConfigError("--bench-frames must be positive");
  BenchOptions options;
  options.frames = static_cast<std::size_t>(cfg.bench_frames);
  options.persons_per_frame = static_cast<std::size_t>(cfg.persons);
  options.seed = cfg.seed;
  options.monitor = monitor_config(cfg);
  if (!cfg.frame_size.empty()) options.frame_dims = parse_frame_size(cfg.frame_size, cfg.target_size);

  const BenchResult r = run_bench(options);
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(r.report_hash));
  out << "frames=" << r.stats.frames << " persons=" << options.persons_per_frame
      << " pairs_per_frame=" << r.pairs_per_frame << " pairs=" << r.stats.pairs
      << " fps=" << text::fixed(r.stats.fps(), 1) << " violations=" << r.stats.violating_pairs
      << " threads=" << r.threads << " report_hash=" << hash << '\n';
  out << "stages lookup_ms=" << text::fixed(r.stages.lookup_ms, 3) << " filter_ms=" << text::fixed(r.stages.filter_ms, 3)
      << " pairwise_ms=" << text::fixed(r.stages.pairwise_ms, 3) << " format_ms=" << text::fixed(r.stages.format_ms, 3)
      << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"distwatch: social-distancing analytics over detector outputs", "distwatch"};
  app.footer(kFooter);
  app.require_subcommand(1);

  auto* detect = app.add_subcommand("detect", "Decode detector outputs into a detection file");
  add_backend_flags(*detect, cfg);

  auto* monitor = app.add_subcommand("monitor", "Per-frame distance, risk and violation report");
  add_backend_flags(*monitor, cfg);
  add_threshold_flags(*monitor, cfg);
  monitor->add_flag("--annotate", cfg.annotate, "Write annotated frame_<n>.ppm files to --out");
  monitor->add_flag("--exit-on-violation", cfg.exit_on_violation, "Exit 1 when any frame had a violation");

  auto* eval = app.add_subcommand("eval", "Precision / recall / mAP benchmark table");
  eval->add_option("--detections", cfg.detections, "Detection file; frame n is the n-th annotation file");
  eval->add_option("--annotations", cfg.annotations, "Directory of Visdrone-format .txt annotations");
  eval->add_option("--metrics", cfg.metrics, "Render a metrics sidecar instead of evaluating");
  eval->add_option("--model-name", cfg.model_name, "Model column value")->capture_default_str();
  eval->add_option("--classes", cfg.classes, "Class registry: coco | visdrone");
  eval->add_option("--conf", cfg.conf, "Confidence cutoff for the Precision/Recall columns")->capture_default_str();
  eval->add_option("--target-size", cfg.target_size, "Size (pixels) column value")->capture_default_str();
  eval->add_option("--out", cfg.out, "Output directory for table.txt and metrics.txt");

  auto* bench = app.add_subcommand("bench", "Detection-file pipeline throughput on synthetic frames");
  bench->add_option("--persons", cfg.persons, "Persons per frame")->capture_default_str();
  bench->add_option("--bench-frames", cfg.bench_frames, "Number of synthetic frames")->capture_default_str();
  bench->add_option("--seed", cfg.seed, "Scene generator seed")->capture_default_str();
  bench->add_option("--frame-size", cfg.frame_size, "Synthetic frame size WxH (default 1920x1080)");
  bench->add_option("--classes", cfg.classes, "Class registry: coco | visdrone");
  add_threshold_flags(*bench, cfg);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    // --help and friends exit 0 after printing the relevant (sub)command help.
    if (app.exit(e, out, err) == 0) return kExitOk;
    err << "run with --help for usage\n";
    return kExitConfig;
  }

  // Evaluation defaults to the Visdrone taxonomy; the pipeline commands to COCO.
  if (*eval && eval->count("--classes") == 0) cfg.classes = "visdrone";

  try {
    parallel::configure_from_env();
    if (*detect) return cmd_detect(cfg, out, err);
    if (*monitor) return cmd_monitor(cfg, out, err);
    if (*eval) return cmd_eval(cfg, out, err);
    if (*bench) return cmd_bench(cfg, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitConfig;
}

}  // namespace distwatch::cli
