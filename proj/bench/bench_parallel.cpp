// Serial reference vs OpenMP kernels. Thread count is the benchmark argument
// for the parallel variants.

#include <benchmark/benchmark.h>

#include "figkit/corpus.hpp"
#include "figkit/features.hpp"
#include "figkit/kappa.hpp"
#include "figkit/parallel.hpp"
#include "figkit/rng.hpp"
#include "figkit/synthetic.hpp"

namespace {

using namespace figkit;

struct FeatureInput {
  NormalizedMap map;
  std::vector<Texel> texels;
};

const FeatureInput& feature_input() {
  static const FeatureInput input = [] {
    const SyntheticMap m = synthesize_map("bench", 400, 400, 3);
    FeatureInput in{normalize_channels(m.image), extract_texels(m.image, nullptr, 50, 25, "bench")};
    return in;
  }();
  return input;
}

const std::vector<FeatureSampleSet>& kappa_input() {
  static const std::vector<FeatureSampleSet> sets = [] {
    Rng rng(5);
    std::vector<FeatureSampleSet> out;
    for (std::size_t s = 0; s < 4; ++s) {
      FeatureSampleSet set;
      set.name = "set" + std::to_string(s);
      set.features = 29;
      const std::size_t rows = 200 + 150 * s;
      for (std::size_t i = 0; i < rows * 29; ++i) set.samples.push_back(i % 2 ? rng.normal() : rng.uniform());
      out.push_back(std::move(set));
    }
    return out;
  }();
  return sets;
}

void BM_FeaturesSerial(benchmark::State& state) {
  const auto& in = feature_input();
  for (auto _ : state) benchmark::DoNotOptimize(extract_features_serial(in.texels, in.map));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(in.texels.size()));
}

void BM_FeaturesParallel(benchmark::State& state) {
  const auto& in = feature_input();
  set_thread_count(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(extract_features(in.texels, in.map));
  set_thread_count(0);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(in.texels.size()));
}

BootstrapOptions kappa_options() {
  BootstrapOptions opt;
  opt.trials = 100;
  opt.seed = 1;
  return opt;
}

void BM_BootstrapSerial(benchmark::State& state) {
  const auto& sets = kappa_input();
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_kappa_serial(sets, kappa_options()));
}

void BM_BootstrapParallel(benchmark::State& state) {
  const auto& sets = kappa_input();
  set_thread_count(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_kappa(sets, kappa_options()));
  set_thread_count(0);
}

}  // namespace

BENCHMARK(BM_FeaturesSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FeaturesParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BootstrapSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BootstrapParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
