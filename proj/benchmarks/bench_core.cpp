#include <benchmark/benchmark.h>

#include "bscatter/analysis.hpp"
#include "bscatter/channel.hpp"
#include "bscatter/mcsim.hpp"
#include "bscatter/special_functions.hpp"

using namespace bscatter;

static void BM_UpperGammaImaginary(benchmark::State& state) {
    const double x = static_cast<double>(state.range(0)) / 10.0;
    for (auto _ : state) benchmark::DoNotOptimize(numerics::upper_gamma(-0.4, {0.0, x}));
}
BENCHMARK(BM_UpperGammaImaginary)->Arg(1)->Arg(20)->Arg(300)->Arg(100000);

static void BM_BesselK0(benchmark::State& state) {
    double x = 0.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(numerics::bessel_k0(x));
        x = x < 50.0 ? x * 1.1 : 0.3;
    }
}
BENCHMARK(BM_BesselK0);

static void BM_FadingCf(benchmark::State& state) {
    const channel::FadingModel m{0.5, 1.0, 1.0, false};
    for (auto _ : state) benchmark::DoNotOptimize(channel::fading_cf(3.7, m));
}
BENCHMARK(BM_FadingCf);

static void BM_FadingCfCached(benchmark::State& state) {
    const channel::FadingModel m{0.5, 1.0, 1.0, false};
    channel::fading_cf_cached(1.0, m);  // build the table outside the loop
    for (auto _ : state) benchmark::DoNotOptimize(channel::fading_cf_cached(3.7, m));
}
BENCHMARK(BM_FadingCfCached);

static void BM_DecodingProbability(benchmark::State& state) {
    SystemParams p;
    p.d_sectors = 8;
    p.delta_hz = 500.0;
    p.tau_linear = 0.1;
    p.rho = static_cast<double>(state.range(0)) / 2.0;
    analysis::decoding_probability(p, p.fading_model());  // warm the cf table
    for (auto _ : state) benchmark::DoNotOptimize(analysis::decoding_probability(p, p.fading_model()));
}
BENCHMARK(BM_DecodingProbability)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_SicDecodingProbability(benchmark::State& state) {
    SystemParams p;
    p.fading_free = true;
    p.d_sectors = 8;
    p.n_sic = 1;
    for (auto _ : state) benchmark::DoNotOptimize(analysis::sic_decoding_probability(p));
}
BENCHMARK(BM_SicDecodingProbability)->Unit(benchmark::kMillisecond);

static void BM_MonteCarloTrials(benchmark::State& state) {
    SystemParams p;
    p.d_sectors = 8;
    p.delta_hz = 500.0;
    mcsim::McOptions o;
    o.threads = 1;
    for (auto _ : state) benchmark::DoNotOptimize(mcsim::estimate_decoding_probability(p, p.fading_model(), 10000, 1, o));
    state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_MonteCarloTrials)->Unit(benchmark::kMillisecond);
