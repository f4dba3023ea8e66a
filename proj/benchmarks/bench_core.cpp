#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "bytetrack/assignment.hpp"
#include "bytetrack/geometry.hpp"
#include "bytetrack/synth.hpp"
#include "bytetrack/tracker.hpp"

using namespace bytetrack;

namespace {

std::vector<BBox> random_boxes(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(0, 1800), h(40, 200);
  std::vector<BBox> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double height = h(rng);
    out.emplace_back(pos(rng), pos(rng) * 0.5, 0.4 * height, height);
  }
  return out;
}

void BM_IouMatrix(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const int n = static_cast<int>(state.range(0));
  const auto a = random_boxes(n, rng);
  const auto b = random_boxes(n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(iou_matrix(a, b));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_IouMatrix)->Arg(100)->Arg(500);

void BM_AssignmentDense(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unit(0, 1);
  const int n = static_cast<int>(state.range(0));
  Eigen::MatrixXd cost(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) cost(i, j) = unit(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(min_cost_assignment(cost, 0.0));
}
BENCHMARK(BM_AssignmentDense)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_AssignmentFromIou(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const int n = static_cast<int>(state.range(0));
  const auto a = random_boxes(n, rng);
  auto b = a;
  for (BBox& box : b) box = box.translated(3, 2);
  const Eigen::MatrixXd cost = 1.0 - iou_matrix(a, b).array();
  for (auto _ : state) benchmark::DoNotOptimize(min_cost_assignment(cost, 0.2));
}
BENCHMARK(BM_AssignmentFromIou)->Arg(100)->Arg(500);

void BM_TrackerDenseSequence(benchmark::State& state) {
  synth::Scenario s = synth::dense_preset();
  s.config.frames = 200;
  const synth::SyntheticSequence seq = synth::generate(s);
  const auto frames = group_by_frame(seq.dets, s.config.frames);
  for (auto _ : state) {
    ByteTracker tracker;
    for (std::size_t k = 0; k < frames.size(); ++k) {
      benchmark::DoNotOptimize(tracker.step(static_cast<int>(k + 1), frames[k]));
    }
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(frames.size()));
}
BENCHMARK(BM_TrackerDenseSequence)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
