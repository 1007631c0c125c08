// SPDX-License-Identifier: Apache-2.0
//
// Encoders and effective-channel building blocks for the five transmission
// schemes: PRPP, SM, PRPP-SM, PIM, and PIM-SM.
//
// Pinned conventions (transmitter and detector must agree):
//  - phase precoder entries are (1/sqrt(rows)) * e^{j*theta} with theta drawn
//    row-major from the seeded stream;
//  - a block's bit field is [precoder-index bits | antenna-index bits |
//    modulation bits], every chunk natural binary, MSB first;
//  - precoder index j is read as base-n_p digits, most significant digit
//    selecting the column of Q_1.

#pragma once

#include <cstdint>
#include <optional>

#include "pimsim/modem.hpp"
#include "pimsim/numerics.hpp"

namespace pimsim {

struct PhasePrecoder {
    int rows = 0;
    int cols = 0;
    std::uint64_t seed = 0;
    CMat matrix;
};

/// rows x cols matrix of pseudo-random phases scaled by 1/sqrt(rows).
/// Regeneration from (seed, rows, cols) is bit-exact.
PhasePrecoder build_prpp(int rows, int cols, std::uint64_t seed);

/// Per-channel-use selection indices j_1..j_p, each in [1, fan]. fan is n_t
/// for antenna patterns and n_p for precoder-column patterns.
struct ActivationPattern {
    int p = 0;
    int fan = 1;
    std::vector<int> indices;

    bool operator==(const ActivationPattern&) const = default;
};

/// The sparse 0/1 expansion: (p*fan) x p, column i carrying a single one at
/// row (i-1)*fan + j_i. Satisfies A^T A = I_p.
CMat expand_activation(const ActivationPattern& pat);

ActivationPattern pattern_from_bits(const Bits& bits, int p, int fan);
Bits bits_from_pattern(const ActivationPattern& pat);

/// Base matrix Q of size p x (p*n_p), partitioned into p blocks of n_p
/// columns. Member j draws column digit_i(j) from block i.
struct PrecoderSet {
    int p = 0;
    int n_p = 1;
    PhasePrecoder q;

    std::uint64_t member_count() const;  // n_p^p
};

/// Throws std::overflow_error when n_p^p does not fit the 64-bit index.
PrecoderSet build_precoder_set(int p, int n_p, std::uint64_t seed);

/// Materialize member j as a dense p x p matrix.
CMat select_precoder(const PrecoderSet& set, std::uint64_t j);

/// The column-selection pattern equivalent of member j (fan = n_p).
ActivationPattern pattern_of_precoder_index(int p, int n_p, std::uint64_t j);
std::uint64_t precoder_index_of_pattern(const ActivationPattern& pat);

/// One transmit hypothesis: the modulation symbols plus whatever index
/// fields the scheme conveys.
struct TxHypothesis {
    CVec symbols;
    std::optional<ActivationPattern> antenna_pattern;
    std::optional<std::uint64_t> precoder_index;
};

/// Precoding material regenerated identically on both sides from the
/// pre-shared config seed. PIM-SM derives independent sub-seeds for P and Q.
struct SchemeMaterials {
    std::optional<PhasePrecoder> prpp;  // P: p x p, or p x (p*n_t) for the SM family
    std::optional<PrecoderSet> set;     // Q and its partition
};

SchemeMaterials make_materials(const SchemeConfig& cfg);

TxHypothesis encode(const SchemeConfig& cfg, const Bits& bits);
Bits decode_bits(const SchemeConfig& cfg, const TxHypothesis& hyp);

/// Per channel use: the active antenna (1-based) and the complex amplitude
/// it radiates. Every scheme here keeps exactly one antenna live per use.
struct TxSignal {
    std::vector<int> antenna;
    CVec amplitude;
};

TxSignal transmit_signal(const SchemeConfig& cfg, const TxHypothesis& hyp, const SchemeMaterials& mats);

/// Joint-hypothesis cardinality of the configured scheme (saturating).
std::uint64_t hypothesis_space_size(const SchemeConfig& cfg);

}  // namespace pimsim
