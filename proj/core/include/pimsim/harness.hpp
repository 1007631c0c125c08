// SPDX-License-Identifier: Apache-2.0
//
// Monte Carlo BER engine. Trial k of SNR point s draws its own generator
// from mix_seed(master_seed, k, s), so any trial replays in isolation and
// trials are independent tasks. Parallel execution accumulates integer
// counters in batch order, which makes the aggregate counts (and the early
// stopping decision) identical for every worker count.

#pragma once

#include <cstdint>
#include <optional>

#include "pimsim/detect.hpp"

namespace pimsim {

struct StopRule {
    std::int64_t target_bit_errors = 200;
    std::int64_t max_trials = 10'000'000;
    std::optional<double> max_wall_seconds;  // timing safety net; not deterministic

    bool operator==(const StopRule&) const = default;
};

struct BerPoint {
    double snr_db = 0.0;
    std::int64_t trials = 0;
    std::int64_t bits = 0;
    std::int64_t bit_errors = 0;
    double ber = 0.0;
    double ci95_halfwidth = 0.0;
    double elapsed_seconds = 0.0;
};

struct BerCurve {
    SchemeConfig config;
    std::vector<BerPoint> points;  // sorted by strictly increasing snr_db
};

struct RunOptions {
    int workers = 1;
    int snr_index = 0;
    const SchemeMaterials* materials = nullptr;  // test hook; defaults to make_materials(cfg)
};

/// Everything one trial produced; used to replay a trial in isolation.
struct TrialRecord {
    Bits tx_bits;
    Bits rx_bits;
    ChannelRealization channel;
    CVec received;
    std::int64_t bit_errors = 0;
};

std::int64_t count_bit_errors(const Bits& a, const Bits& b);

/// Run a single trial from its counter-derived seed: draw bits, encode, draw
/// channel, transmit, add noise, detect, count positional bit errors.
TrialRecord replay_trial(const SchemeConfig& cfg, double sigma2, std::uint64_t trial_seed,
                         const SchemeMaterials* materials = nullptr);

BerPoint run_point(const SchemeConfig& cfg, double snr_db, const StopRule& stop, std::uint64_t master_seed,
                   const RunOptions& opts = {});

BerCurve run_sweep(const SchemeConfig& cfg, const std::vector<double>& snr_db_list, const StopRule& stop,
                   std::uint64_t master_seed, int workers = 1, const SchemeMaterials* materials = nullptr);

/// SNR gap between two curves at a BER level, interpolated linearly in
/// (snr_db, log10 ber): returns snr_b - snr_a, or nullopt when either curve
/// fails to bracket the level within its sweep range.
std::optional<double> gap_at_ber(const BerCurve& a, const BerCurve& b, double ber_level);

/// Crossing SNR of one curve at a BER level (same interpolation rule).
std::optional<double> crossing_snr(const BerCurve& curve, double ber_level);

}  // namespace pimsim
