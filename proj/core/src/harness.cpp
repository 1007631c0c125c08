// SPDX-License-Identifier: Apache-2.0

#include "pimsim/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

namespace pimsim {

namespace {

using Clock = std::chrono::steady_clock;

struct Counts {
    std::int64_t errors = 0;
    std::int64_t bits = 0;
};

// Batch size is a pinned function of the config only: stopping is evaluated
// at batch boundaries, so the boundary layout must not depend on worker
// count or timing. Cheap detections get larger batches.
std::int64_t pinned_batch_size(const SchemeConfig& cfg) {
    if (cfg.detector == DetectorKind::Las) return 64;
    const std::uint64_t space = hypothesis_space_size(cfg);
    const std::uint64_t b = (1ull << 18) / std::max<std::uint64_t>(space, 1);
    return static_cast<std::int64_t>(std::clamp<std::uint64_t>(b, 1, 256));
}

Counts run_one_trial(const SchemeConfig& cfg, const Alphabet& alph, const SchemeMaterials& mats, double sigma2,
                     std::uint64_t seed, TrialRecord* capture) {
    Rng rng(seed);

    const std::size_t n_bits = static_cast<std::size_t>(cfg.p) * spectral_efficiency(cfg);
    Bits tx(n_bits);
    for (std::size_t i = 0; i < n_bits; ++i) tx[i] = static_cast<std::uint8_t>(rng.next_u64() & 1);

    const TxHypothesis hyp = encode(cfg, tx);
    const ChannelRealization chan = draw_channel(rng, cfg.p, cfg.n_t, cfg.n_r);
    const CVec clean = apply_channel(chan, transmit_signal(cfg, hyp, mats));
    const CVec y = sigma2 > 0.0 ? add_noise(rng, clean, NoiseSpec{sigma2}) : clean;

    DetectionResult det;
    if (cfg.detector == DetectorKind::Las) {
        const CMat g = prpp_effective_channel(chan, mats.prpp.value());
        const CVec soft = mmse_estimate(g, y, sigma2);
        CVec init(soft.size());
        for (std::size_t i = 0; i < soft.size(); ++i) init[i] = alph.points[nearest_point(alph, soft[i])];
        det = las_detect(g, y, alph, init);
    } else {
        det = ml_detect(cfg, y, chan, mats);
    }

    const Bits rx = decode_result(cfg, det);
    const std::int64_t errors = count_bit_errors(tx, rx);
    if (capture) {
        capture->tx_bits = tx;
        capture->rx_bits = rx;
        capture->channel = chan;
        capture->received = y;
        capture->bit_errors = errors;
    }
    return {errors, static_cast<std::int64_t>(n_bits)};
}

void validate_stop(const StopRule& stop) {
    if (stop.target_bit_errors < 1 || stop.max_trials < 1) {
        throw std::invalid_argument("stop rule: target_bit_errors and max_trials must be >= 1");
    }
}

}  // namespace

std::int64_t count_bit_errors(const Bits& a, const Bits& b) {
    if (a.size() != b.size()) throw std::invalid_argument("count_bit_errors: length mismatch");
    std::int64_t n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) n += (a[i] ^ b[i]) & 1;
    return n;
}

TrialRecord replay_trial(const SchemeConfig& cfg, double sigma2, std::uint64_t trial_seed,
                         const SchemeMaterials* materials) {
    cfg.validate();
    const Alphabet alph = make_alphabet(cfg.alphabet);
    const SchemeMaterials mats = materials ? *materials : make_materials(cfg);
    TrialRecord rec;
    run_one_trial(cfg, alph, mats, sigma2, trial_seed, &rec);
    return rec;
}

BerPoint run_point(const SchemeConfig& cfg, double snr_db, const StopRule& stop, std::uint64_t master_seed,
                   const RunOptions& opts) {
    cfg.validate();
    validate_stop(stop);
    const auto t0 = Clock::now();

    const Alphabet alph = make_alphabet(cfg.alphabet);
    const SchemeMaterials mats = opts.materials ? *opts.materials : make_materials(cfg);
    const double sigma2 = snr_to_sigma2(snr_db).sigma2;
    const int workers = std::max(1, opts.workers);
    const std::uint64_t snr_index = static_cast<std::uint64_t>(opts.snr_index);

    const std::int64_t batch = pinned_batch_size(cfg);
    const std::int64_t total_batches = (stop.max_trials + batch - 1) / batch;

    auto run_batch = [&](std::int64_t b) -> Counts {
        const std::int64_t lo = b * batch;
        const std::int64_t hi = std::min(lo + batch, stop.max_trials);
        Counts c;
        for (std::int64_t k = lo; k < hi; ++k) {
            const Counts one =
                run_one_trial(cfg, alph, mats, sigma2, mix_seed(master_seed, static_cast<std::uint64_t>(k), snr_index),
                              nullptr);
            c.errors += one.errors;
            c.bits += one.bits;
        }
        return c;
    };

    BerPoint point;
    point.snr_db = snr_db;
    std::int64_t done_batches = 0;
    bool stopped = false;
    std::vector<Counts> round_counts;

    while (!stopped && done_batches < total_batches) {
        const std::int64_t round = std::min<std::int64_t>(static_cast<std::int64_t>(workers) * 2,
                                                          total_batches - done_batches);
        round_counts.assign(static_cast<std::size_t>(round), Counts{});
        if (workers == 1) {
            for (std::int64_t i = 0; i < round; ++i) round_counts[static_cast<std::size_t>(i)] = run_batch(done_batches + i);
        } else {
            std::vector<std::thread> pool;
            pool.reserve(workers);
            for (int w = 0; w < workers; ++w) {
                pool.emplace_back([&, w] {
                    for (std::int64_t i = w; i < round; i += workers) {
                        round_counts[static_cast<std::size_t>(i)] = run_batch(done_batches + i);
                    }
                });
            }
            for (auto& th : pool) th.join();
        }

        // Accumulate in batch order; the stopping batch is therefore the
        // same no matter how the round was scheduled.
        const std::int64_t round_start = done_batches;
        for (std::int64_t i = 0; i < round; ++i) {
            const std::int64_t b = round_start + i;
            const std::int64_t lo = b * batch;
            const std::int64_t hi = std::min(lo + batch, stop.max_trials);
            point.bit_errors += round_counts[static_cast<std::size_t>(i)].errors;
            point.bits += round_counts[static_cast<std::size_t>(i)].bits;
            point.trials += hi - lo;
            ++done_batches;
            if (point.bit_errors >= stop.target_bit_errors || point.trials >= stop.max_trials) {
                stopped = true;
                break;
            }
        }
        if (!stopped && stop.max_wall_seconds &&
            std::chrono::duration<double>(Clock::now() - t0).count() >= *stop.max_wall_seconds) {
            stopped = true;
        }
    }

    if (point.bits > 0) {
        point.ber = static_cast<double>(point.bit_errors) / static_cast<double>(point.bits);
        point.ci95_halfwidth = 1.96 * std::sqrt(point.ber * (1.0 - point.ber) / static_cast<double>(point.bits));
    }
    point.elapsed_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return point;
}

BerCurve run_sweep(const SchemeConfig& cfg, const std::vector<double>& snr_db_list, const StopRule& stop,
                   std::uint64_t master_seed, int workers, const SchemeMaterials* materials) {
    for (std::size_t i = 1; i < snr_db_list.size(); ++i) {
        if (!(snr_db_list[i] > snr_db_list[i - 1])) {
            throw std::invalid_argument("run_sweep: SNR list must be strictly increasing");
        }
    }
    BerCurve curve;
    curve.config = cfg;
    curve.points.reserve(snr_db_list.size());
    for (std::size_t i = 0; i < snr_db_list.size(); ++i) {
        RunOptions opts;
        opts.workers = workers;
        opts.snr_index = static_cast<int>(i);
        opts.materials = materials;
        curve.points.push_back(run_point(cfg, snr_db_list[i], stop, master_seed, opts));
    }
    return curve;
}

std::optional<double> crossing_snr(const BerCurve& curve, double ber_level) {
    if (!(ber_level > 0.0)) throw std::invalid_argument("crossing_snr: level must be > 0");
    const auto& pts = curve.points;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double ba = pts[i].ber;
        const double bb = pts[i + 1].ber;
        if (ba <= 0.0 || bb <= 0.0 || ba == bb) continue;
        if ((ba - ber_level) * (bb - ber_level) > 0.0) continue;
        const double la = std::log10(ba);
        const double lb = std::log10(bb);
        const double t = (std::log10(ber_level) - la) / (lb - la);
        return pts[i].snr_db + t * (pts[i + 1].snr_db - pts[i].snr_db);
    }
    return std::nullopt;
}

std::optional<double> gap_at_ber(const BerCurve& a, const BerCurve& b, double ber_level) {
    const auto sa = crossing_snr(a, ber_level);
    const auto sb = crossing_snr(b, ber_level);
    if (!sa || !sb) return std::nullopt;
    return *sb - *sa;
}

}  // namespace pimsim
