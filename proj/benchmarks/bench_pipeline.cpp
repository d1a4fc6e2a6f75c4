// Microbenchmarks for the hot paths: noise synthesis, filtering, feature
// extraction, classifier training, and the full closed-loop selection.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "tactbci/config.hpp"
#include "tactbci/decoder.hpp"
#include "tactbci/dsp.hpp"
#include "tactbci/signal.hpp"
#include "tactbci/swlda.hpp"

using namespace tactbci;

namespace {

Dataset calibration_sized_dataset() {
  // 540 x 160 with a smooth class-dependent bump over a band of columns,
  // roughly what a calibration session hands to the trainer
  std::mt19937 gen(7);
  std::normal_distribution<double> noise(0.0, 1.0);
  Dataset d;
  for (int r = 0; r < 540; ++r) {
    FeatureVector fv;
    const bool target = r % 6 == 0;
    fv.label = target ? TargetFlag::kTarget : TargetFlag::kNonTarget;
    fv.values.resize(160);
    for (int c = 0; c < 160; ++c) {
      double v = noise(gen);
      if (target && c >= 64 && c < 96) {
        const double x = (c - 80.0) / 8.0;
        v += 1.5 * std::exp(-0.5 * x * x);
      }
      fv.values[static_cast<std::size_t>(c)] = v;
    }
    d.push_row(fv);
  }
  return d;
}

void BM_BackgroundSynthesis(benchmark::State& state) {
  const auto layout = ChannelLayout::parietal_default();
  const NoiseModel noise;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_background(layout, 1.0, noise, seed++));
  }
  state.SetItemsProcessed(state.iterations() * 8 * 512);
}
BENCHMARK(BM_BackgroundSynthesis);

void BM_FilterChain(benchmark::State& state) {
  const FilterChain chain = design_chain(512.0);
  std::mt19937 gen(2);
  std::normal_distribution<double> dist(0.0, 10.0);
  std::vector<double> x(10 * 512);
  for (auto& v : x) v = dist(gen);
  for (auto _ : state) {
    benchmark::DoNotOptimize(apply_chain(chain, x));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()));
}
BENCHMARK(BM_FilterChain);

void BM_DecimateEpoch(benchmark::State& state) {
  Epoch epoch;
  epoch.samples.assign(8, std::vector<double>(410));
  std::mt19937 gen(3);
  std::normal_distribution<double> dist(0.0, 10.0);
  for (auto& ch : epoch.samples) {
    for (auto& v : ch) v = dist(gen);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(decimate_epoch(epoch, 20));
  }
}
BENCHMARK(BM_DecimateEpoch);

void BM_SwldaTrain(benchmark::State& state) {
  const Dataset d = calibration_sized_dataset();
  for (auto _ : state) {
    benchmark::DoNotOptimize(train(d));
  }
}
BENCHMARK(BM_SwldaTrain);

void BM_OnlineSelection(benchmark::State& state) {
  // one full decode at stock settings: schedule, synthesize, filter,
  // decimate, score, decide
  static const Config cfg = [] {
    Config c;
    c.seed = 11;
    return c;
  }();
  static const SwldaModel model =
      run_calibration(cfg.simulation(SessionMode::kCalibration)).second;
  const std::vector<CommandId> intent{2};
  std::uint64_t seed = 100;
  for (auto _ : state) {
    Config c = cfg;
    c.seed = seed++;
    benchmark::DoNotOptimize(run_online(c.simulation(SessionMode::kOnline, 1), model, intent));
  }
}
BENCHMARK(BM_OnlineSelection);

}  // namespace

BENCHMARK_MAIN();
