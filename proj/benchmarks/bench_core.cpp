#include <benchmark/benchmark.h>

#include "seqdet/detector.hpp"
#include "seqdet/montecarlo.hpp"
#include "seqdet/rng.hpp"

using namespace seqdet;

static void BM_ShiryaevUpdate(benchmark::State& state) {
  const Prior prior = Prior::geometric(0.1);
  DetectorState detector = make_shiryaev_state(prior, 1e300);
  Rng rng(1);
  for (auto _ : state) {
    shiryaev_update(detector, 0.1 * (rng.uniform() - 0.5), prior);
    benchmark::DoNotOptimize(detector.log_stat);
  }
}
BENCHMARK(BM_ShiryaevUpdate);

static void BM_SrUpdate(benchmark::State& state) {
  DetectorState detector = make_sr_state(1e300);
  Rng rng(2);
  for (auto _ : state) {
    sr_update(detector, 0.1 * (rng.uniform() - 0.5));
    benchmark::DoNotOptimize(detector.log_stat);
  }
}
BENCHMARK(BM_SrUpdate);

static void BM_NormalDraw(benchmark::State& state) {
  Rng rng(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rng.normal());
  }
}
BENCHMARK(BM_NormalDraw);

template <typename Model>
static void BM_ModelStep(benchmark::State& state, const Model& model) {
  Rng rng(4);
  auto sampler = model.make_sampler(50);
  auto llr = model.make_llr_stream();
  for (auto _ : state) {
    benchmark::DoNotOptimize(llr->push(sampler->next(rng)));
  }
}

static void BM_IidStep(benchmark::State& state) {
  BM_ModelStep(state, IidGaussianMeanModel(1.0, 1.0));
}
BENCHMARK(BM_IidStep);

static void BM_ArSignalStep(benchmark::State& state) {
  BM_ModelStep(state, ArSignalModel({0.6, -0.3}, 1.0, 1.0));
}
BENCHMARK(BM_ArSignalStep);

static void BM_VarianceStep(benchmark::State& state) {
  BM_ModelStep(state, VarianceChangeModel(1.0, 2.0));
}
BENCHMARK(BM_VarianceStep);

static void BM_Ar1Step(benchmark::State& state) {
  BM_ModelStep(state, Ar1CorrelationModel(0.5, 0.0));
}
BENCHMARK(BM_Ar1Step);

static void BM_PfaEstimate(benchmark::State& state) {
  const IidGaussianMeanModel model(1.0, 1.0);
  const Prior prior = Prior::geometric(0.1);
  MCOptions options;
  options.trials = static_cast<std::uint64_t>(state.range(0));
  options.seed = 5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        estimate_pfa(Procedure::shiryaev, model, prior, 99.0, options));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(options.trials));
}
BENCHMARK(BM_PfaEstimate)->Arg(1000);

BENCHMARK_MAIN();
