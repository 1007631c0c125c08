// SPDX-License-Identifier: Apache-2.0
//
// Exhaustive joint ML detection for all five schemes, plus MMSE and
// likelihood-ascent-search (LAS) detection for large-p PRPP.
//
// Enumeration order is pinned: precoder index, then antenna pattern, then
// symbol index, each ascending (equivalently, the bit image of the
// hypothesis). Exact metric ties resolve to the lowest-ranked hypothesis.
// The detector regenerates its precoding material from the pre-shared
// config seed; callers pass the same SchemeMaterials the transmitter used.

#pragma once

#include <cstdint>
#include <functional>

#include "pimsim/channel.hpp"
#include "pimsim/modem.hpp"
#include "pimsim/schemes.hpp"

namespace pimsim {

struct HypothesisBudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultMlBudget = 1ull << 24;

struct DetectionResult {
    TxHypothesis hypothesis;
    double metric = 0.0;  // residual ||y - yhat||^2 of the decision
    std::uint64_t candidates_evaluated = 0;
    std::uint64_t flips = 0;  // LAS only
};

/// Exact argmin over the full joint hypothesis space. Refuses spaces larger
/// than `budget` (defaults to 2^24) and points the caller at LAS instead.
DetectionResult ml_detect(const SchemeConfig& cfg, const CVec& y, const ChannelRealization& chan,
                          const SchemeMaterials& mats, std::uint64_t budget = kDefaultMlBudget);

/// PIM detection through the column-activation formulation (receive model
/// D*Q*B*x instead of D*P_j*x). Kept as a separate code path; decisions must
/// match ml_detect exactly.
DetectionResult ml_detect_pim_activation(const SchemeConfig& cfg, const CVec& y, const ChannelRealization& chan,
                                         const SchemeMaterials& mats, std::uint64_t budget = kDefaultMlBudget);

/// Virtual-MIMO matrix G = D*P of a PRPP link (n_t = 1).
CMat prpp_effective_channel(const ChannelRealization& chan, const PhasePrecoder& prpp);

/// x_hat = (G^H G + sigma2*I)^-1 G^H y. G may be square or tall.
CVec mmse_estimate(const CMat& g_eff, const CVec& y, double sigma2);

struct LasFlip {
    int coord;
    Cplx from;
    Cplx to;
    double predicted_delta;  // metric change computed from the caches
};

/// Greedy best-first single-coordinate descent on the ML metric from an
/// alphabet-quantized initial estimate. Applies the best strictly-improving
/// flip per step using cached G^H(y - Gs) and column Gram values, and stops
/// at a local minimum. The result metric never exceeds the init metric.
DetectionResult las_detect(const CMat& g_eff, const CVec& y, const Alphabet& alphabet, const CVec& init,
                           const std::function<void(const LasFlip&)>& on_flip = {});

/// Inverse of encode applied to a detection decision.
Bits decode_result(const SchemeConfig& cfg, const DetectionResult& result);

}  // namespace pimsim
