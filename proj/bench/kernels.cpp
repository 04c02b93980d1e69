// Serial reference kernels against their OpenMP counterparts.
// Thread count follows DISTWATCH_THREADS / OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <random>

#include "distwatch/parallel.hpp"
#include "distwatch/reference.hpp"

using namespace distwatch;

namespace {

std::vector<Centroid> scene(std::size_t n) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ux(0, 1920), uy(0, 1080);
  std::vector<Centroid> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({ux(rng), uy(rng), i});
  return out;
}

AnchorSet s_anchors() {
  AnchorSet set;
  set.layers = {{8, {{10, 13}, {16, 30}, {33, 23}}}, {16, {{30, 61}, {62, 45}, {59, 119}}},
                {32, {{116, 90}, {156, 198}, {373, 326}}}};
  return set;
}

/// P3 head at 640 with random logits; about 1% of cells clear the threshold.
RawLayerOutput p3_head() {
  std::mt19937_64 rng(9);
  std::normal_distribution<float> n(-6.0f, 2.0f);
  auto raw = RawLayerOutput::zeros(0, 8, 3, 80, 85);
  for (float& v : raw.values) v = n(rng);
  return raw;
}

Image frame(int w, int h) {
  Image img(w, h);
  std::mt19937 rng(3);
  for (auto& b : img.pixels()) b = static_cast<std::uint8_t>(rng());
  return img;
}

void BM_PairwiseSerial(benchmark::State& state) {
  const auto persons = scene(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::pairwise(persons, Thresholds{}, std::nullopt));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pair_count(persons.size())));
}

void BM_PairwiseParallel(benchmark::State& state) {
  const auto persons = scene(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(pairwise(persons, Thresholds{}, std::nullopt));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pair_count(persons.size())));
  state.counters["threads"] = parallel::max_threads();
}

void BM_DecodeSerial(benchmark::State& state) {
  const auto raw = p3_head();
  const auto anchors = s_anchors();
  const DecodeConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(reference::decode_layer(raw, anchors, cfg));
}

void BM_DecodeParallel(benchmark::State& state) {
  const auto raw = p3_head();
  const auto anchors = s_anchors();
  const DecodeConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(decode_layer(raw, anchors, cfg));
  state.counters["threads"] = parallel::max_threads();
}

void BM_LetterboxSerial(benchmark::State& state) {
  const Image img = frame(1920, 1080);
  for (auto _ : state) benchmark::DoNotOptimize(reference::letterbox(img));
}

void BM_LetterboxParallel(benchmark::State& state) {
  const Image img = frame(1920, 1080);
  for (auto _ : state) benchmark::DoNotOptimize(letterbox(img));
  state.counters["threads"] = parallel::max_threads();
}

}  // namespace

BENCHMARK(BM_PairwiseSerial)->Arg(50)->Arg(200)->Arg(1000);
BENCHMARK(BM_PairwiseParallel)->Arg(50)->Arg(200)->Arg(1000);
BENCHMARK(BM_DecodeSerial);
BENCHMARK(BM_DecodeParallel);
BENCHMARK(BM_LetterboxSerial);
BENCHMARK(BM_LetterboxParallel);

int main(int argc, char** argv) {
  parallel::configure_from_env();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
