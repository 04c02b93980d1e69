#pragma once

#include <cstdint>
#include <string>

#include "distwatch/geometry.hpp"
#include "distwatch/monitor.hpp"

namespace distwatch {

struct BenchOptions {
  std::size_t frames = 1000;
  std::size_t persons_per_frame = 50;
  std::uint64_t seed = 1;
  FrameDims frame_dims{1920, 1080};
  MonitorConfig monitor;
};

struct StageTimings {
  double lookup_ms = 0.0;
  double filter_ms = 0.0;
  double pairwise_ms = 0.0;
  double format_ms = 0.0;
};

struct BenchResult {
  SessionStats stats;
  std::size_t pairs_per_frame = 0;
  std::uint64_t report_hash = 0;
  StageTimings stages;
  int threads = 1;
};

/// FNV-1a 64.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Detection-file pipeline over synthetic frames: a full run_session pass for
/// throughput and the report hash, then a serial per-stage timing pass.
BenchResult run_bench(const BenchOptions& options);

}  // namespace distwatch
