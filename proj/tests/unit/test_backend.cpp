#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "distwatch/backend.hpp"
#include "distwatch/detection_file.hpp"
#include "distwatch/errors.hpp"
#include "support/fixtures.hpp"

using namespace distwatch;

namespace {

AnchorSet s_anchors() { return read_anchor_file(fixtures::data("anchors/yolov5s.anchors")); }
AnchorSet s6_anchors() { return read_anchor_file(fixtures::data("anchors/yolov5s6.anchors")); }

DecodeConfig small_cfg() {
  DecodeConfig cfg;
  cfg.target_size = 64;
  return cfg;
}

}  // namespace

TEST_CASE("backend kind names") {
  CHECK(parse_backend_kind("model") == BackendKind::Model);
  CHECK(parse_backend_kind("raw-tensor-file") == BackendKind::RawTensorFile);
  CHECK(parse_backend_kind("detection-file") == BackendKind::DetectionFile);
  CHECK(to_string(BackendKind::RawTensorFile) == "raw-tensor-file");
  CHECK_THROWS_AS(parse_backend_kind("onnx"), ConfigError);
}

TEST_CASE("detection-file backend serves records verbatim") {
  const std::string text =
      "frame=0 dets=0\n"
      "frame=3 dets=1\n"
      "0 0.75 10 20 30 60\n";
  std::istringstream in(text);
  DetectionFileBackend backend(parse_detection_file(in));
  CHECK(backend.available_frames() == 2u);
  CHECK(backend.frame_indices() == std::vector<std::uint64_t>{0, 3});
  CHECK(backend.detections_for({0, 0, 0}, nullptr).empty());
  const auto d = backend.detections_for({3, 0, 0}, nullptr);
  REQUIRE(d.size() == 1);
  CHECK(d[0] == Detection{0, 0.75, {10, 20, 30, 60}});
  try {
    backend.detections_for({1, 0, 0}, nullptr);
    FAIL("expected NoDetectionsRecorded");
  } catch (const NoDetectionsRecorded& e) {
    CHECK(e.frame_index() == 1);
  }
}

TEST_CASE("open_backend: detection file with two records") {
  auto backend = open_backend(BackendKind::DetectionFile, fixtures::data("monitor/two_frames.det"), {}, std::nullopt);
  CHECK(backend->kind() == BackendKind::DetectionFile);
  CHECK(backend->available_frames() == 2u);
  CHECK(backend->concurrent());
}

TEST_CASE("detection file parse errors carry line numbers") {
  auto fails_at = [](const std::string& text, std::size_t line) {
    std::istringstream in(text);
    try {
      parse_detection_file(in, "d.det");
    } catch (const ParseError& e) {
      CHECK(e.line() == line);
      return;
    }
    FAIL("expected a parse error");
  };
  fails_at("frame=0 dets=1\n0 0.5 1 2 3\n", 2);
  fails_at("frame=0 dets=1\n0 1.5 1 2 3 4\n", 2);
  fails_at("frame=0 dets=1\n0 0.5 5 2 3 4\n", 2);
  fails_at("frame=0 dets=0\nframe=0 dets=0\n", 2);
  fails_at("frame=2 dets=0\nframe=1 dets=0\n", 2);
  fails_at("frame=0 dets=2\n0 0.5 1 2 3 4\n", 2);
  fails_at("frame=x dets=0\n", 1);
  fails_at("0 0.5 1 2 3 4\n", 1);
  fails_at("frame=0 dets=1\n-1 0.5 1 2 3 4\n", 2);
}

TEST_CASE("detection file round trip") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> coord(0, 2000), conf(0, 1);
  std::vector<DetectionFileRecord> records;
  for (std::uint64_t f = 0; f < 30; f += 1 + rng() % 3) {
    DetectionFileRecord r{f, {}};
    for (int k = 0; k < static_cast<int>(rng() % 6); ++k) {
      double x1 = coord(rng), x2 = coord(rng), y1 = coord(rng), y2 = coord(rng);
      if (x1 > x2) std::swap(x1, x2);
      if (y1 > y2) std::swap(y1, y2);
      r.detections.push_back({static_cast<int>(rng() % 80), conf(rng), {x1, y1, x2, y2}});
    }
    records.push_back(std::move(r));
  }
  std::ostringstream out;
  write_detection_file(out, records);
  std::istringstream in(out.str());
  const auto back = parse_detection_file(in);
  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(back[i].frame_index == records[i].frame_index);
    REQUIRE(back[i].detections.size() == records[i].detections.size());
    for (std::size_t k = 0; k < records[i].detections.size(); ++k) {
      const auto& a = back[i].detections[k];
      const auto& b = records[i].detections[k];
      CHECK(a.class_id == b.class_id);
      CHECK(std::abs(a.confidence - b.confidence) <= 1e-6);
      CHECK(std::abs(a.box.x1 - b.box.x1) <= 1e-6);
      CHECK(std::abs(a.box.y2 - b.box.y2) <= 1e-6);
    }
  }
  // Shortest round-trip formatting is in fact exact.
  CHECK(back == records);

  fixtures::TempDir dir("detfile");
  write_detection_file(dir / "r.det", records);
  CHECK(read_detection_file(dir / "r.det") == records);
}

TEST_CASE("synthetic scenes are deterministic") {
  SyntheticSceneOptions opt;
  opt.frames = 5;
  opt.persons_per_frame = 7;
  const auto a = make_synthetic_records(opt);
  CHECK(a == make_synthetic_records(opt));
  REQUIRE(a.size() == 5);
  for (const auto& r : a) {
    CHECK(r.detections.size() == 7);
    for (const auto& d : r.detections) {
      CHECK(d.box.valid());
      CHECK(d.box.x2 <= 1920);
      CHECK(d.box.y2 <= 1080);
    }
  }
  opt.seed = 2;
  CHECK(a != make_synthetic_records(opt));
}

TEST_CASE("raw-tensor backend: single-cell fixture gives one detection") {
  auto backend = open_backend(BackendKind::RawTensorFile, fixtures::data("tensors"), small_cfg(), s_anchors());
  CHECK(backend->available_frames() == 1u);
  const auto dets = backend->detections_for({0, 64, 64}, nullptr);
  REQUIRE(dets.size() == 1);
  CHECK(dets[0].class_id == 0);
  CHECK(dets[0].box == Box{23, 13.5, 33, 26.5});
}

TEST_CASE("raw-tensor backend equals decode_frame on the same tensors") {
  fixtures::TempDir dir("rawcomp");
  const AnchorSet anchors = s_anchors();
  const DecodeConfig cfg = small_cfg();
  std::mt19937 rng(4);
  std::normal_distribution<float> logit(-2.0f, 3.0f);
  std::vector<std::vector<RawLayerOutput>> frames;
  for (int f = 0; f < 3; ++f) {
    std::vector<RawLayerOutput> layers;
    for (int l = 0; l < 3; ++l) {
      const int stride = anchors.layers[static_cast<std::size_t>(l)].stride;
      auto raw = RawLayerOutput::zeros(l, stride, 3, 64 / stride, 85);
      for (float& v : raw.values) v = logit(rng);
      layers.push_back(std::move(raw));
    }
    write_tensor_file(dir / ("f" + std::to_string(f) + ".tens"), layers);
    frames.push_back(std::move(layers));
  }
  std::ofstream(dir / "notes.txt") << "ignored: not a .tens file\n";

  RawTensorBackend backend(dir.path(), cfg, anchors);
  REQUIRE(backend.available_frames() == 3u);
  for (std::uint64_t f = 0; f < 3; ++f) {
    for (auto [w, h] : {std::pair{64, 64}, std::pair{128, 72}}) {
      const auto t = letterbox_transform(w, h, 64);
      const auto direct = decode_frame(frames[f], anchors, cfg, t, w, h);
      CHECK(!direct.empty());
      CHECK(backend.detections_for({f, w, h}, nullptr) == direct);
    }
  }
  CHECK_THROWS_AS(backend.detections_for({3, 64, 64}, nullptr), NoDetectionsRecorded);
}

TEST_CASE("raw-tensor backend: layer count mismatch and missing input") {
  CHECK_THROWS_AS(RawTensorBackend(fixtures::data("tensors/frame_0000.tens"), small_cfg(), s6_anchors()),
                  FormatError);
  CHECK_THROWS_AS(RawTensorBackend(fixtures::data("tensors/none"), small_cfg(), s_anchors()), FormatError);
  CHECK_THROWS_AS(open_backend(BackendKind::RawTensorFile, fixtures::data("tensors"), small_cfg(), std::nullopt),
                  ConfigError);
  CHECK_THROWS_AS(open_backend(BackendKind::Model, fixtures::data("models/tiny_s6.onnx"), {}, std::nullopt),
                  ConfigError);

  fixtures::TempDir empty("rawempty");
  RawTensorBackend none(empty.path(), small_cfg(), s_anchors());
  CHECK(none.available_frames() == 0u);
}

TEST_CASE("validate_model_io") {
  const AnchorSet s6 = s6_anchors();
  const DecodeConfig cfg;
  const std::vector<TensorShape> four{{1, 3, 80, 80, 85}, {1, 3, 40, 40, 85}, {1, 3, 20, 20, 85}, {1, 3, 10, 10, 85}};
  CHECK_NOTHROW(validate_model_io({1, 3, 640, 640}, four, s6, cfg));
  CHECK_NOTHROW(validate_model_io({1, 640, 640, 3}, four, s6, cfg));
  const std::vector<TensorShape> reordered{four[3], four[1], four[0], four[2]};
  CHECK_NOTHROW(validate_model_io({1, 3, 640, 640}, reordered, s6, cfg));

  CHECK_THROWS_AS(validate_model_io({1, 3, 320, 320}, four, s6, cfg), FormatError);
  const std::vector<TensorShape> three(four.begin(), four.begin() + 3);
  CHECK_THROWS_AS(validate_model_io({1, 3, 640, 640}, three, s6, cfg), FormatError);
  CHECK_NOTHROW(validate_model_io({1, 3, 640, 640}, three, s_anchors(), cfg));
  const std::vector<TensorShape> two(four.begin(), four.begin() + 2);
  CHECK_THROWS_AS(validate_model_io({1, 3, 640, 640}, two, s6, cfg), FormatError);

  auto bad = four;
  bad[1][4] = 15;
  CHECK_THROWS_AS(validate_model_io({1, 3, 640, 640}, bad, s6, cfg), FormatError);
  DecodeConfig visdrone;
  visdrone.registry = visdrone_registry();
  const std::vector<TensorShape> nc10{{1, 3, 80, 80, 15}, {1, 3, 40, 40, 15}, {1, 3, 20, 20, 15}, {1, 3, 10, 10, 15}};
  CHECK_NOTHROW(validate_model_io({1, 3, 640, 640}, nc10, s6, visdrone));
  bad = four;
  bad[2] = {1, 3, 30, 30, 85};
  CHECK_THROWS_AS(validate_model_io({1, 3, 640, 640}, bad, s6, cfg), FormatError);
  bad = four;
  bad[0][1] = 4;
  CHECK_THROWS_AS(validate_model_io({1, 3, 640, 640}, bad, s6, cfg), FormatError);
  bad = four;
  bad[3] = four[0];
  CHECK_THROWS_AS(validate_model_io({1, 3, 640, 640}, bad, s6, cfg), FormatError);
}

TEST_CASE("model backend on the tiny ONNX fixtures" * doctest::skip(!model_backend_available())) {
  const AnchorSet s6 = s6_anchors();
  auto backend = open_backend(BackendKind::Model, fixtures::data("models/tiny_s6.onnx"), {}, s6);
  CHECK(backend->kind() == BackendKind::Model);

  // A white pixel at (8,8) lights P3 cell (1,1), anchor 0 (19x27), centre (12,12).
  Image frame(640, 640, {114, 114, 114});
  frame.set(8, 8, {255, 255, 255});
  const auto dets = backend->detections_for({0, 640, 640}, &frame);
  REQUIRE(dets.size() == 1);
  CHECK(dets[0].class_id == 0);
  CHECK(dets[0].confidence > 0.99);
  CHECK(dets[0].box.x1 == doctest::Approx(2.5));
  CHECK(dets[0].box.x2 == doctest::Approx(21.5));
  CHECK(dets[0].box.y1 == 0.0);
  CHECK(dets[0].box.y2 == doctest::Approx(25.5));

  const Image blank(640, 640, {114, 114, 114});
  CHECK(backend->detections_for({1, 640, 640}, &blank).empty());
  CHECK_THROWS_AS(backend->detections_for({2, 640, 640}, nullptr), FormatError);

  CHECK_NOTHROW(open_backend(BackendKind::Model, fixtures::data("models/tiny_s.onnx"), {}, s_anchors()));
  CHECK_THROWS_AS(open_backend(BackendKind::Model, fixtures::data("models/tiny_s.onnx"), {}, s6),
                  FormatError);
  DecodeConfig visdrone;
  visdrone.registry = visdrone_registry();
  CHECK_THROWS_AS(open_backend(BackendKind::Model, fixtures::data("models/tiny_s6.onnx"), visdrone, s6),
                  FormatError);
  CHECK_THROWS_AS(open_backend(BackendKind::Model, fixtures::data("anchors/yolov5s.anchors"), {}, s_anchors()),
                  FormatError);
}
