#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "distwatch/cli.hpp"
#include "distwatch/detection_file.hpp"
#include "distwatch/errors.hpp"
#include "distwatch/image.hpp"
#include "distwatch/parallel.hpp"
#include "support/fixtures.hpp"

using namespace distwatch;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string data(const std::string& rel) { return fixtures::data(rel).string(); }

}  // namespace

TEST_CASE("cli: help, unknown flags, missing subcommand") {
  const Run help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("Exit codes") != std::string::npos);
  CHECK(help.out.find("DISTWATCH_THREADS") != std::string::npos);

  const Run mhelp = run({"monitor", "--help"});
  CHECK(mhelp.code == 0);
  for (const char* flag : {"--backend", "--model", "--tensors", "--detections", "--anchors", "--classes", "--frames",
                           "--out", "--conf", "--nms-iou", "--high-below", "--medium-upper", "--violation-below",
                           "--calibration", "--annotate", "--exit-on-violation"}) {
    CHECK_MESSAGE(mhelp.out.find(flag) != std::string::npos, flag);
  }

  CHECK(run({"monitor", "--bogus"}).code == cli::kExitConfig);
  CHECK(run({}).code == cli::kExitConfig);
  CHECK(run({"frobnicate"}).code == cli::kExitConfig);
  CHECK(run({"monitor", "--conf", "abc"}).code == cli::kExitConfig);
}

TEST_CASE("cli detect: raw-tensor fixture, empty source, missing anchors") {
  const Run r = run({"detect", "--tensors", data("tensors"), "--anchors", data("anchors/yolov5s.anchors"),
                     "--target-size", "64"});
  CHECK(r.code == 0);
  std::istringstream in(r.out);
  const auto records = parse_detection_file(in);
  REQUIRE(records.size() == 1);
  REQUIRE(records[0].detections.size() == 1);
  CHECK(records[0].detections[0].box == Box{23, 13.5, 33, 26.5});

  fixtures::TempDir out("detect_out");
  const Run to_dir = run({"detect", "--backend", "raw-tensor-file", "--tensors", data("tensors"), "--anchors",
                          data("anchors/yolov5s.anchors"), "--target-size", "64", "--out", out.path().string()});
  CHECK(to_dir.code == 0);
  CHECK(fixtures::slurp(out / "detections.txt") == r.out);

  fixtures::TempDir empty("detect_empty");
  const Run none = run({"detect", "--tensors", empty.path().string(), "--anchors", data("anchors/yolov5s.anchors"),
                        "--out", out.path().string()});
  CHECK(none.code == 0);
  CHECK(fixtures::slurp(out / "detections.txt").empty());

  const Run no_anchors = run({"detect", "--tensors", data("tensors")});
  CHECK(no_anchors.code == cli::kExitConfig);
  CHECK(no_anchors.err.find("--anchors") != std::string::npos);

  const Run mismatch = run({"detect", "--tensors", data("tensors"), "--anchors", data("anchors/yolov5s6.anchors"),
                            "--target-size", "64"});
  CHECK(mismatch.code == cli::kExitData);

  const Run wrong_classes = run({"detect", "--tensors", data("tensors"), "--anchors",
                                 data("anchors/yolov5s6_visdrone.meta"), "--classes", "coco"});
  CHECK(wrong_classes.code == cli::kExitData);

  CHECK(run({"detect", "--backend", "detection-file", "--detections", data("monitor/two_frames.det")}).code ==
        cli::kExitConfig);
  CHECK(run({"detect", "--tensors", data("tensors"), "--anchors", data("anchors/yolov5s.anchors"), "--conf", "1.5"})
            .code == cli::kExitConfig);
}

TEST_CASE("cli monitor: exit codes and summary") {
  const Run strict = run({"monitor", "--detections", data("monitor/two_frames.det"), "--exit-on-violation"});
  CHECK(strict.code == cli::kExitViolations);

  const Run lenient = run({"monitor", "--detections", data("monitor/two_frames.det")});
  CHECK(lenient.code == 0);
  CHECK(lenient.out.find("frame=0 persons=2 pairs=1 violations=1 verdict=unsafe\n") == 0);
  CHECK(lenient.out.find("frames=2 fps=") != std::string::npos);
  CHECK(lenient.out.find(" violations=1\n") != std::string::npos);

  fixtures::TempDir zero("monitor_zero");
  std::ofstream(zero / "none.det") << "";
  const Run empty = run({"monitor", "--detections", (zero / "none.det").string(), "--exit-on-violation"});
  CHECK(empty.code == 0);
  CHECK(empty.out.find("frames=0 ") == 0);

  fixtures::TempDir out("monitor_out");
  const Run to_dir = run({"monitor", "--backend", "detection-file", "--detections", data("monitor/two_frames.det"),
                          "--out", out.path().string()});
  CHECK(to_dir.code == 0);
  CHECK(fixtures::slurp(out / "report.txt") ==
        "frame=0 persons=2 pairs=1 violations=1 verdict=unsafe\n"
        "pair 0 1 d_px=100.000 d_units=NA risk=H viol=1\n"
        "frame=1 persons=2 pairs=1 violations=0 verdict=safe\n"
        "pair 0 1 d_px=400.000 d_units=NA risk=L viol=0\n");

  // 2 px per cm: 100 px is 50 cm, not below the 50 cm default.
  const Run cm = run({"monitor", "--detections", data("monitor/two_frames.det"), "--calibration",
                      data("calibration/cm.cal"), "--exit-on-violation"});
  CHECK(cm.code == 0);
  CHECK(cm.out.find("d_units=50.000 risk=H viol=0") != std::string::npos);
  const Run flagged = run({"monitor", "--detections", data("monitor/two_frames.det"), "--violation-below", "50"});
  CHECK(flagged.out.find("violations=0\n") != std::string::npos);

  CHECK(run({"monitor", "--detections", data("monitor/two_frames.det"), "--high-below", "300", "--medium-upper",
             "250"})
            .code == cli::kExitConfig);
  CHECK(run({"monitor", "--detections", data("monitor/missing.det")}).code == cli::kExitData);
  CHECK(run({"monitor"}).code == cli::kExitConfig);
  CHECK(run({"monitor", "--detections", data("monitor/two_frames.det"), "--annotate"}).code == cli::kExitConfig);
}

TEST_CASE("cli monitor: annotated frames and missing records") {
  fixtures::TempDir frames("cli_frames");
  fixtures::TempDir out("cli_annot");
  for (const char* name : {"f0.ppm", "f1.ppm", "f2.ppm"}) write_ppm(frames / name, Image(640, 360));
  std::ofstream(frames / "zz.ppm") << "P6 broken";
  const Run r = run({"monitor", "--detections", data("monitor/two_frames.det"), "--frames", frames.path().string(),
                     "--annotate", "--out", out.path().string()});
  CHECK(r.code == 0);
  CHECK(std::filesystem::exists(out / "frame_0.ppm"));
  CHECK(std::filesystem::exists(out / "frame_1.ppm"));
  CHECK_FALSE(std::filesystem::exists(out / "frame_2.ppm"));
  CHECK(r.err.find("frame 2: no detections recorded") != std::string::npos);
  CHECK(r.err.find("zz.ppm") != std::string::npos);
  CHECK(r.out.find("frames=2 ") == 0);
}

TEST_CASE("cli eval: perfect, published metrics, malformed") {
  const Run perfect = run({"eval", "--detections", data("eval/perfect.det"), "--annotations",
                           data("eval/annotations"), "--model-name", "fixture"});
  CHECK(perfect.code == 0);
  CHECK(perfect.out.find("fixture 640 All 100.0 100.0 100.0 100.0\n") != std::string::npos);

  const Run empty = run({"eval", "--detections", data("eval/empty.det"), "--annotations", data("eval/annotations")});
  CHECK(empty.out.find("model 640 All 0.0 0.0 0.0 0.0\n") != std::string::npos);

  fixtures::TempDir out("eval_out");
  const Run published = run({"eval", "--metrics", data("eval/yolov5s_published.metrics"), "--out", out.path().string()});
  CHECK(published.code == 0);
  CHECK(published.out.find("YOLOv5s 640 Car 56.5 71.9 45.5 70.6\n") != std::string::npos);
  CHECK(published.out.find("YOLOv5s 640 All 38.1 30.4 14.4 27.8\n") != std::string::npos);
  CHECK(fixtures::slurp(out / "table.txt") == published.out);
  const Run again = run({"eval", "--metrics", (out / "metrics.txt").string()});
  CHECK(again.out == published.out);

  const Run modified = run({"eval", "--metrics", data("eval/yolov5s6_modified_published.metrics")});
  CHECK(modified.out.find("YOLOv5s6_modified_bottleneckCSP 640 Car 58.5 78.9 49.5 72.6\n") != std::string::npos);

  const Run bad = run({"eval", "--detections", data("eval/perfect.det"), "--annotations", data("eval/malformed")});
  CHECK(bad.code == cli::kExitData);
  CHECK(bad.err.find("0000001.txt:2:") != std::string::npos);

  CHECK(run({"eval", "--detections", data("eval/perfect.det")}).code == cli::kExitConfig);
}

TEST_CASE("cli bench") {
  const Run zero = run({"bench", "--persons", "0", "--bench-frames", "1000"});
  CHECK(zero.code == 0);
  CHECK(zero.out.find("frames=1000 persons=0 pairs_per_frame=0 pairs=0 fps=") == 0);

  const Run fifty = run({"bench", "--persons", "50", "--bench-frames", "50"});
  CHECK(fifty.code == 0);
  CHECK(fifty.out.find("pairs_per_frame=1225 pairs=61250 ") != std::string::npos);
  CHECK(fifty.out.find("\nstages lookup_ms=") != std::string::npos);

  CHECK(run({"bench", "--persons", "-1"}).code == cli::kExitConfig);
  CHECK(run({"bench", "--bench-frames", "0"}).code == cli::kExitConfig);
}

TEST_CASE("DISTWATCH_THREADS") {
  CHECK(parallel::parse_thread_cap("3") == 3);
  CHECK_THROWS_AS(parallel::parse_thread_cap("0"), ConfigError);
  CHECK_THROWS_AS(parallel::parse_thread_cap("many"), ConfigError);

  const int before = parallel::max_threads();
  ::setenv("DISTWATCH_THREADS", "nope", 1);
  const Run bad = run({"bench", "--persons", "2", "--bench-frames", "3"});
  CHECK(bad.code == cli::kExitConfig);
  CHECK(bad.err.find("DISTWATCH_THREADS") != std::string::npos);

  ::setenv("DISTWATCH_THREADS", "2", 1);
  const Run ok = run({"bench", "--persons", "2", "--bench-frames", "3"});
  CHECK(ok.code == 0);
  if (parallel::openmp_enabled()) CHECK(ok.out.find("threads=2 ") != std::string::npos);
  ::unsetenv("DISTWATCH_THREADS");
  parallel::set_max_threads(before);
}
