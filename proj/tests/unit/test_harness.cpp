// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pimsim/harness.hpp"
#include "support/test_support.hpp"

using namespace pimsim;
using pimsim::testing::rayleigh_bpsk_ber;

namespace {

SchemeConfig quick_cfg() {
    SchemeConfig cfg;
    cfg.scheme = Scheme::Prpp;
    cfg.p = 2;
    cfg.alphabet = Mod::Qam4;
    cfg.seed = 5;
    return cfg;
}

bool same_counts(const BerPoint& a, const BerPoint& b) {
    return a.trials == b.trials && a.bits == b.bits && a.bit_errors == b.bit_errors && a.snr_db == b.snr_db;
}

}  // namespace

TEST_CASE("bit error counting is positional and symmetric") {
    CHECK(count_bit_errors({0, 1, 1, 0}, {0, 1, 1, 0}) == 0);
    CHECK(count_bit_errors({0, 1, 1, 0}, {1, 1, 0, 0}) == 2);
    CHECK(count_bit_errors({0, 1}, {1, 0}) == count_bit_errors({1, 0}, {0, 1}));
    CHECK_THROWS_AS(count_bit_errors({0}, {0, 1}), std::invalid_argument);
}

TEST_CASE("replay_trial is deterministic and consistent with its own error count") {
    const SchemeConfig cfg = quick_cfg();
    const TrialRecord a = replay_trial(cfg, 0.5, 12345);
    const TrialRecord b = replay_trial(cfg, 0.5, 12345);
    CHECK(a.tx_bits == b.tx_bits);
    CHECK(a.rx_bits == b.rx_bits);
    CHECK(a.received == b.received);
    for (int i = 0; i < cfg.p; ++i) CHECK(a.channel.blocks[i] == b.channel.blocks[i]);
    CHECK(a.bit_errors == count_bit_errors(a.tx_bits, a.rx_bits));

    const TrialRecord c = replay_trial(cfg, 0.5, 12346);
    CHECK(a.received != c.received);
}

TEST_CASE("high-snr points are error-free for small blocks") {
    SchemeConfig cfg = quick_cfg();
    StopRule stop;
    stop.target_bit_errors = 1;  // stop on the first error, if any
    stop.max_trials = 1000;
    const BerPoint pt = run_point(cfg, 60.0, stop, 99);
    CHECK(pt.trials == 1000);
    CHECK(pt.bit_errors == 0);
    CHECK(pt.ber == 0.0);
}

TEST_CASE("run_point is deterministic for a fixed master seed") {
    const SchemeConfig cfg = quick_cfg();
    StopRule stop;
    stop.target_bit_errors = 60;
    stop.max_trials = 5000;
    const BerPoint a = run_point(cfg, 8.0, stop, 2024);
    const BerPoint b = run_point(cfg, 8.0, stop, 2024);
    CHECK(same_counts(a, b));
    const BerPoint c = run_point(cfg, 8.0, stop, 2025);
    CHECK(!same_counts(a, c));
}

TEST_CASE("worker count never changes the aggregate counts") {
    const SchemeConfig cfg = quick_cfg();

    StopRule fixed;
    fixed.target_bit_errors = 1'000'000'000;  // no early stop
    fixed.max_trials = 600;
    RunOptions w1, w3;
    w1.workers = 1;
    w3.workers = 3;
    const BerPoint a = run_point(cfg, 6.0, fixed, 7, w1);
    const BerPoint b = run_point(cfg, 6.0, fixed, 7, w3);
    CHECK(a.trials == 600);
    CHECK(same_counts(a, b));

    StopRule early;
    early.target_bit_errors = 40;
    early.max_trials = 100000;
    RunOptions w4;
    w4.workers = 4;
    const BerPoint c = run_point(cfg, 6.0, early, 7, w1);
    const BerPoint d = run_point(cfg, 6.0, early, 7, w4);
    CHECK(same_counts(c, d));
    CHECK(c.bit_errors >= 40);
}

TEST_CASE("every trial replays in isolation") {
    const SchemeConfig cfg = quick_cfg();
    const double snr_db = 7.0;
    const double sigma2 = snr_to_sigma2(snr_db).sigma2;
    const std::uint64_t master = 31337;
    const int snr_index = 2;

    StopRule fixed;
    fixed.target_bit_errors = 1'000'000'000;
    fixed.max_trials = 200;
    RunOptions opts;
    opts.snr_index = snr_index;
    const BerPoint pt = run_point(cfg, snr_db, fixed, master, opts);

    std::int64_t errors = 0, bits = 0;
    for (std::int64_t k = 0; k < pt.trials; ++k) {
        const TrialRecord rec = replay_trial(cfg, sigma2, mix_seed(master, static_cast<std::uint64_t>(k),
                                                                   static_cast<std::uint64_t>(snr_index)));
        errors += rec.bit_errors;
        bits += static_cast<std::int64_t>(rec.tx_bits.size());
    }
    CHECK(errors == pt.bit_errors);
    CHECK(bits == pt.bits);
}

TEST_CASE("uncoded bpsk over rayleigh matches the closed form") {
    SchemeConfig cfg;
    cfg.scheme = Scheme::Prpp;
    cfg.p = 1;
    cfg.alphabet = Mod::Bpsk;
    cfg.seed = 1;

    SchemeMaterials trivial;
    trivial.prpp = PhasePrecoder{1, 1, 0, CMat::identity(1)};

    StopRule stop;  // 200 errors
    RunOptions opts;
    opts.materials = &trivial;
    const BerPoint pt = run_point(cfg, 10.0, stop, 777, opts);
    const double want = rayleigh_bpsk_ber(10.0);
    CHECK(std::abs(pt.ber - want) <= 3.0 * pt.ci95_halfwidth);
}

TEST_CASE("sweeps validate inputs and keep per-point independence") {
    const SchemeConfig cfg = quick_cfg();
    StopRule stop;
    stop.target_bit_errors = 30;
    stop.max_trials = 3000;

    const BerCurve empty = run_sweep(cfg, {}, stop, 1);
    CHECK(empty.points.empty());

    CHECK_THROWS_AS(run_sweep(cfg, {0.0, 0.0}, stop, 1), std::invalid_argument);

    const BerCurve a = run_sweep(cfg, {0.0, 6.0}, stop, 1);
    const BerCurve b = run_sweep(cfg, {0.0, 6.0}, stop, 1);
    REQUIRE(a.points.size() == 2);
    for (int i = 0; i < 2; ++i) CHECK(same_counts(a.points[i], b.points[i]));
}

TEST_CASE("ber drops with snr with disjoint confidence intervals") {
    SchemeConfig cfg;
    cfg.scheme = Scheme::PrppSm;
    cfg.p = 5;
    cfg.n_t = 4;
    cfg.alphabet = Mod::Bpsk;
    cfg.seed = 11;
    StopRule stop;  // 200 errors
    stop.max_trials = 200000;

    const BerPoint lo = run_point(cfg, 8.0, stop, 5);
    RunOptions opts;
    opts.snr_index = 1;
    const BerPoint hi = run_point(cfg, 20.0, stop, 5, opts);
    CHECK(hi.ber + hi.ci95_halfwidth < lo.ber - lo.ci95_halfwidth);
}

TEST_CASE("gap measurement on synthetic curves") {
    BerCurve a;
    a.config = quick_cfg();
    for (double snr : {0.0, 5.0, 10.0, 15.0}) {
        BerPoint pt;
        pt.snr_db = snr;
        pt.ber = std::pow(10.0, -snr / 5.0);  // clean log-linear decade slope
        pt.bits = 1000000;
        a.points.push_back(pt);
    }
    BerCurve b = a;
    for (BerPoint& pt : b.points) pt.snr_db += 3.0;

    CHECK(*gap_at_ber(a, a, 1e-2) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(*gap_at_ber(a, b, 1e-2) == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(*gap_at_ber(b, a, 1e-2) == doctest::Approx(-3.0).epsilon(1e-9));
    CHECK(!gap_at_ber(a, b, 1e-9).has_value());  // below both sweeps
    CHECK_THROWS_AS(crossing_snr(a, 0.0), std::invalid_argument);
}

TEST_CASE("confidence halfwidth halves when bits quadruple at a fixed rate") {
    auto synthetic = [](std::int64_t bits) {
        BerPoint pt;
        pt.bits = bits;
        pt.bit_errors = bits / 100;  // exact 1e-2 rate
        pt.ber = static_cast<double>(pt.bit_errors) / static_cast<double>(pt.bits);
        pt.ci95_halfwidth = 1.96 * std::sqrt(pt.ber * (1 - pt.ber) / static_cast<double>(pt.bits));
        return pt;
    };
    const BerPoint n = synthetic(100000);
    const BerPoint n4 = synthetic(400000);
    CHECK(n4.ci95_halfwidth == doctest::Approx(n.ci95_halfwidth / 2.0).epsilon(1e-12));
}

TEST_CASE("stop rules are validated") {
    const SchemeConfig cfg = quick_cfg();
    StopRule bad;
    bad.target_bit_errors = 0;
    CHECK_THROWS_AS(run_point(cfg, 0.0, bad, 1), std::invalid_argument);
    bad.target_bit_errors = 10;
    bad.max_trials = 0;
    CHECK_THROWS_AS(run_point(cfg, 0.0, bad, 1), std::invalid_argument);
}

TEST_CASE("wall-clock bound stops a point early") {
    SchemeConfig cfg;
    cfg.scheme = Scheme::Prpp;
    cfg.p = 5;
    cfg.alphabet = Mod::Qam16;  // heavy enough that the cap binds
    cfg.seed = 3;
    StopRule stop;
    stop.target_bit_errors = 1'000'000'000;
    stop.max_trials = 1'000'000;
    stop.max_wall_seconds = 0.3;
    const BerPoint pt = run_point(cfg, 10.0, stop, 1);
    CHECK(pt.trials < stop.max_trials);
    CHECK(pt.trials >= 1);
}
