#include <benchmark/benchmark.h>

#include "topotrace/kernels.hpp"
#include "topotrace/raster.hpp"
#include "topotrace/synth.hpp"

namespace {

using namespace topotrace;

const SynthScene& scene(int size) {
    static std::map<int, SynthScene> cache;
    auto it = cache.find(size);
    if (it == cache.end()) {
        SynthParams params;
        params.seed = 7;
        params.width = params.height = size;
        params.branch_prob = 0.2;
        params.n_components = 2;
        it = cache.emplace(size, generate_network(params)).first;
    }
    return it->second;
}

BinaryMask thick(int size) {
    const auto blurred = kernels::serial::line_box_blur(scene(size).mask, 2);
    return kernels::serial::threshold(blurred, 0.5);
}

template <bool Parallel>
void BM_ThinningCandidates(benchmark::State& state) {
    const auto mask = thick(static_cast<int>(state.range(0)));
    BinaryMask marks;
    for (auto _ : state) {
        if constexpr (Parallel)
            kernels::mark_thinning_candidates(mask, 0, marks);
        else
            kernels::serial::mark_thinning_candidates(mask, 0, marks);
        benchmark::DoNotOptimize(marks.values().data());
    }
}

template <bool Parallel>
void BM_RenderHeatmap(benchmark::State& state) {
    const int size = static_cast<int>(state.range(0));
    std::vector<PixelCoord> locs;
    for (int i = 0; i < 16; ++i) locs.push_back({(i * 37) % size, (i * 53) % size});
    for (auto _ : state) {
        auto map = Parallel ? kernels::render_heatmap(locs, 2.0, size, size)
                            : kernels::serial::render_heatmap(locs, 2.0, size, size);
        benchmark::DoNotOptimize(map.values().data());
    }
}

template <bool Parallel>
void BM_LineBoxBlur(benchmark::State& state) {
    const auto& mask = scene(static_cast<int>(state.range(0))).mask;
    for (auto _ : state) {
        auto map = Parallel ? kernels::line_box_blur(mask, 3) : kernels::serial::line_box_blur(mask, 3);
        benchmark::DoNotOptimize(map.values().data());
    }
}

template <bool Parallel>
void BM_Threshold(benchmark::State& state) {
    const auto map = kernels::serial::line_box_blur(scene(static_cast<int>(state.range(0))).mask, 3);
    for (auto _ : state) {
        auto mask = Parallel ? kernels::threshold(map, 0.5) : kernels::serial::threshold(map, 0.5);
        benchmark::DoNotOptimize(mask.values().data());
    }
}

template <bool Parallel>
void BM_MatchCandidates(benchmark::State& state) {
    const int size = static_cast<int>(state.range(0));
    const auto& gt = scene(size).mask;
    const auto pred = thick(size);
    for (auto _ : state) {
        auto pairs = Parallel ? kernels::match_candidates(pred, gt, 2.0) : kernels::serial::match_candidates(pred, gt, 2.0);
        benchmark::DoNotOptimize(pairs.data());
    }
}

}  // namespace

BENCHMARK(BM_ThinningCandidates<false>)->Arg(256)->Arg(512);
BENCHMARK(BM_ThinningCandidates<true>)->Arg(256)->Arg(512);
BENCHMARK(BM_RenderHeatmap<false>)->Arg(256)->Arg(512);
BENCHMARK(BM_RenderHeatmap<true>)->Arg(256)->Arg(512);
BENCHMARK(BM_LineBoxBlur<false>)->Arg(256)->Arg(512);
BENCHMARK(BM_LineBoxBlur<true>)->Arg(256)->Arg(512);
BENCHMARK(BM_Threshold<false>)->Arg(256)->Arg(512);
BENCHMARK(BM_Threshold<true>)->Arg(256)->Arg(512);
BENCHMARK(BM_MatchCandidates<false>)->Arg(256)->Arg(512);
BENCHMARK(BM_MatchCandidates<true>)->Arg(256)->Arg(512);

BENCHMARK_MAIN();
