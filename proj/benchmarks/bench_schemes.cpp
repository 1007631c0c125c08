// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "pimsim/channel.hpp"
#include "pimsim/schemes.hpp"

using namespace pimsim;

namespace {

void BM_BuildPrpp(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    std::uint64_t seed = 1;
    for (auto _ : state) {
        const PhasePrecoder prpp = build_prpp(p, p, seed++);
        benchmark::DoNotOptimize(prpp.matrix.data());
    }
}

void BM_BuildPrecoderSet(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    std::uint64_t seed = 1;
    for (auto _ : state) {
        const PrecoderSet set = build_precoder_set(p, 4, seed++);
        benchmark::DoNotOptimize(set.q.matrix.data());
    }
}

void BM_DrawChannel(benchmark::State& state) {
    Rng rng(3);
    for (auto _ : state) {
        const ChannelRealization chan = draw_channel(rng, static_cast<int>(state.range(0)), 4, 1);
        benchmark::DoNotOptimize(chan.blocks.data());
    }
}

}  // namespace

BENCHMARK(BM_BuildPrpp)->Arg(5)->Arg(50)->Arg(400);
BENCHMARK(BM_BuildPrecoderSet)->Arg(5)->Arg(10);
BENCHMARK(BM_DrawChannel)->Arg(5)->Arg(50);
