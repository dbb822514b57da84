// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

// Serial reference against the OpenMP path for the data-parallel kernels.

#include <benchmark/benchmark.h>

#include "catts/calibtrain.hpp"
#include "catts/confidence.hpp"
#include "catts/harness.hpp"
#include "catts/log.hpp"
#include "catts/noisegen.hpp"
#include "catts/simulated.hpp"
#include "../tests/scenarios.hpp"

using namespace catts;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::Parallel : Exec::Serial; }

void BM_ApplyNoise(benchmark::State& state) {
  RasterImage img{1024, 1024, 3, std::vector<std::uint8_t>(1024 * 1024 * 3)};
  Rng rng(1);
  for (auto& s : img.samples) s = static_cast<std::uint8_t>(rng.next());
  SaliencyMap sal = uniform_saliency(img.width, img.height, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(apply_noise(img, sal, 64.0, 7, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(img.samples.size()));
}

void BM_Certainties(benchmark::State& state) {
  Rng rng(2);
  std::vector<SequenceTrace> traces(8192);
  for (auto& t : traces) t.tokens = scenarios::random_tokens(rng, 0.2 + 0.7 * rng.uniform(), 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(certainties(traces, Aggregation::mean(), 5, exec_of(state)));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(traces.size()));
}

void BM_GenerateMany(benchmark::State& state) {
  const auto g = scenarios::scaling_benchmark(1, 3);
  SimulatedBackend backend(g.scenario);
  GenerationRequest proto;
  proto.prompt = "Which option is shown?";
  proto.route.question_id = g.records[0].id;
  const std::size_t inflight = state.range(0) ? 8 : 1;
  for (auto _ : state) benchmark::DoNotOptimize(generate_many(backend, proto, 4096, 11, inflight));
  state.SetItemsProcessed(state.iterations() * 4096);
}

void BM_RunRecords(benchmark::State& state) {
  set_log_level("error");
  const auto g = scenarios::scaling_benchmark(256, 4);
  auto backend = std::make_shared<SimulatedBackend>(g.scenario);
  RunConfig config;
  config.n = 32;
  config.max_inflight = state.range(0) ? 8 : 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_records(g.records, config, {backend, backend}, PromptLibrary::bundled()));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.records.size()));
}

void BM_CalibrationDemo(benchmark::State& state) {
  calib::DemoConfig config;
  config.steps = 100;
  for (auto _ : state) benchmark::DoNotOptimize(calib::run_demo(config, 17, exec_of(state)));
}

}  // namespace

BENCHMARK(BM_ApplyNoise)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Certainties)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_GenerateMany)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RunRecords)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CalibrationDemo)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
