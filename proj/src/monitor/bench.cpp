#include "distwatch/bench.hpp"

#include <chrono>
#include <sstream>

#include "distwatch/parallel.hpp"

namespace distwatch {

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

BenchResult run_bench(const BenchOptions& options) {
  SyntheticSceneOptions scene;
  scene.frames = options.frames;
  scene.persons_per_frame = options.persons_per_frame;
  scene.frame_width = options.frame_dims.width;
  scene.frame_height = options.frame_dims.height;
  scene.person_class_id = options.monitor.registry.person_ids.empty() ? 0 : options.monitor.registry.person_ids.front();
  scene.seed = options.seed;
  DetectionFileBackend backend(make_synthetic_records(scene));

  BenchResult result;
  result.threads = parallel::max_threads();
  result.pairs_per_frame = pair_count(options.persons_per_frame);

  std::ostringstream report;
  SessionSinks sinks;
  sinks.report = &report;
  result.stats = run_session(feed_from_indices(backend.frame_indices(), options.frame_dims), backend,
                             options.monitor, sinks);
  result.report_hash = fnv1a64(report.view());

  using clock = std::chrono::steady_clock;
  auto ms = [](clock::duration d) { return std::chrono::duration<double, std::milli>(d).count(); };
  for (std::uint64_t index : backend.frame_indices()) {
    const FrameInfo info{index, options.frame_dims.width, options.frame_dims.height};
    const auto t0 = clock::now();
    const auto dets = backend.detections_for(info, nullptr);
    const auto t1 = clock::now();
    FrameReport r;
    r.frame_index = index;
    r.persons = filter_persons(dets, options.monitor.registry);
    for (std::size_t k = 0; k < r.persons.size(); ++k) r.centroids.push_back(centroid(r.persons[k], k));
    const auto t2 = clock::now();
    r.pairs = pairwise(r.centroids, options.monitor.thresholds, options.monitor.calibration);
    const auto t3 = clock::now();
    [[maybe_unused]] const std::string text = format_report(r);
    const auto t4 = clock::now();
    result.stages.lookup_ms += ms(t1 - t0);
    result.stages.filter_ms += ms(t2 - t1);
    result.stages.pairwise_ms += ms(t3 - t2);
    result.stages.format_ms += ms(t4 - t3);
  }
  return result;
}

}  // namespace distwatch
