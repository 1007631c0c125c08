// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "pimsim/detect.hpp"
#include "pimsim/harness.hpp"

using namespace pimsim;

namespace {

struct Fixture {
    SchemeConfig cfg;
    SchemeMaterials mats;
    ChannelRealization chan;
    CVec y;

    explicit Fixture(SchemeConfig c) : cfg(std::move(c)), mats(make_materials(cfg)) {
        const TrialRecord rec = replay_trial(cfg, snr_to_sigma2(10.0).sigma2, 7);
        chan = rec.channel;
        y = rec.received;
    }
};

void run_ml(benchmark::State& state, SchemeConfig cfg) {
    const Fixture fx(std::move(cfg));
    std::uint64_t hyps = 0;
    for (auto _ : state) {
        const DetectionResult res = ml_detect(fx.cfg, fx.y, fx.chan, fx.mats);
        benchmark::DoNotOptimize(res.metric);
        hyps += res.candidates_evaluated;
    }
    state.counters["hyps/s"] = benchmark::Counter(static_cast<double>(hyps), benchmark::Counter::kIsRate);
}

SchemeConfig cfg_of(Scheme s, int p, int n_t, int n_p, Mod mod) {
    SchemeConfig cfg;
    cfg.scheme = s;
    cfg.p = p;
    cfg.n_t = n_t;
    cfg.n_p = n_p;
    cfg.alphabet = mod;
    cfg.seed = 21;
    return cfg;
}

void BM_MlSm(benchmark::State& state) { run_ml(state, cfg_of(Scheme::Sm, 1, 4, 1, Mod::Qam4)); }
void BM_MlPrpp(benchmark::State& state) { run_ml(state, cfg_of(Scheme::Prpp, 5, 1, 1, Mod::Qam8)); }
void BM_MlPrppSm(benchmark::State& state) { run_ml(state, cfg_of(Scheme::PrppSm, 5, 4, 1, Mod::Bpsk)); }
void BM_MlPim(benchmark::State& state) { run_ml(state, cfg_of(Scheme::Pim, 5, 1, 4, Mod::Qam4)); }
void BM_MlPimSm(benchmark::State& state) { run_ml(state, cfg_of(Scheme::PimSm, 5, 4, 2, Mod::Bpsk)); }

void BM_LasPrpp(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    SchemeConfig cfg = cfg_of(Scheme::Prpp, p, 1, 1, Mod::Bpsk);
    cfg.detector = DetectorKind::Las;
    const Fixture fx(std::move(cfg));
    const Alphabet alph = make_alphabet(Mod::Bpsk);
    const double sigma2 = snr_to_sigma2(10.0).sigma2;
    const CMat g = prpp_effective_channel(fx.chan, *fx.mats.prpp);
    for (auto _ : state) {
        const CVec soft = mmse_estimate(g, fx.y, sigma2);
        CVec init(soft.size());
        for (std::size_t i = 0; i < soft.size(); ++i) init[i] = alph.points[nearest_point(alph, soft[i])];
        const DetectionResult res = las_detect(g, fx.y, alph, init);
        benchmark::DoNotOptimize(res.metric);
    }
}

}  // namespace

BENCHMARK(BM_MlSm);
BENCHMARK(BM_MlPrpp)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MlPrppSm)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MlPim)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MlPimSm)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LasPrpp)->Arg(50)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);
