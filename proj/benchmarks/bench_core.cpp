#include "polarkit/entropy.hpp"
#include "polarkit/geometry.hpp"
#include "polarkit/regress.hpp"
#include "polarkit/rng.hpp"
#include "polarkit/synth.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace polarkit;

namespace {

std::vector<double> distribution(int n) {
    SplitMix64 rng(1);
    std::vector<double> p(static_cast<std::size_t>(n));
    double sum = 0.0;
    for (auto& v : p) {
        v = rng.next_open_double();
        sum += v;
    }
    for (auto& v : p) v /= sum;
    return p;
}

void BM_ShannonEntropy(benchmark::State& state) {
    const auto p = distribution(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(shannon_entropy(p));
}
BENCHMARK(BM_ShannonEntropy)->Arg(6)->Arg(12)->Arg(64);

void BM_WeightedEntropy(benchmark::State& state) {
    const auto p = distribution(static_cast<int>(state.range(0)));
    const std::vector<double> w(p.size(), 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(weighted_entropy(p, w));
}
BENCHMARK(BM_WeightedEntropy)->Arg(12);

// Fit at the scale of the merged frame-level dataset: ~14.7k rows, 13
// columns including the region dummies.
void BM_OlsFitFrameScale(benchmark::State& state) {
    SynthConfig cfg;
    cfg.rng_seed = 2;
    cfg.n_provinces = 81;
    cfg.frames_per_province = 182; // 14,742 rows
    const auto synth = generate(cfg);
    const auto design = build_design(synth.table, synth.model);
    for (auto _ : state) benchmark::DoNotOptimize(ols_fit(design));
}
BENCHMARK(BM_OlsFitFrameScale)->Unit(benchmark::kMillisecond);

void BM_VifFrameScale(benchmark::State& state) {
    SynthConfig cfg;
    cfg.rng_seed = 3;
    cfg.n_provinces = 81;
    cfg.frames_per_province = 182;
    const auto synth = generate(cfg);
    const auto design = build_design(synth.table, synth.model);
    for (auto _ : state) benchmark::DoNotOptimize(vif(design));
}
BENCHMARK(BM_VifFrameScale)->Unit(benchmark::kMillisecond);

void BM_FramePairMeans(benchmark::State& state) {
    SplitMix64 rng(4);
    std::vector<double> values(64);
    for (auto& v : values) v = rng.next_double();
    DepthMap map(8, 8, std::move(values));
    std::vector<Detection> dets;
    for (int i = 0; i < state.range(0); ++i) {
        Detection d;
        d.cx = rng.next_double();
        d.cy = rng.next_double();
        d.bw = 0.1;
        d.bh = 0.2;
        d.cls = (i % 2) ? PedestrianClass::rp : PedestrianClass::nrp;
        dets.push_back(d);
    }
    for (auto _ : state) benchmark::DoNotOptimize(frame_pair_means("f", dets, map));
}
BENCHMARK(BM_FramePairMeans)->Arg(4)->Arg(12);

void BM_GenerateBundle(benchmark::State& state) {
    SynthConfig cfg;
    cfg.rng_seed = 5;
    cfg.n_provinces = 24;
    cfg.frames_per_province = 8;
    for (auto _ : state) benchmark::DoNotOptimize(generate_bundle(cfg));
}
BENCHMARK(BM_GenerateBundle)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
