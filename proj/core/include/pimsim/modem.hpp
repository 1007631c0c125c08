// SPDX-License-Identifier: Apache-2.0
//
// Modulation alphabets, bit<->symbol mapping, and per-scheme spectral
// efficiency accounting.
//
// Bit-to-point convention, pinned: a chunk of bits_per_symbol bits (MSB
// first) indexes `points` directly. The point list is laid out so that this
// labeling is Gray: the high half of the chunk selects the in-phase level,
// the low half the quadrature level, each axis Gray-coded with index 0 on
// the positive end (BPSK: bit 0 -> +1, bit 1 -> -1). All alphabets are
// scaled to unit average energy.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pimsim/numerics.hpp"

namespace pimsim {

using Bits = std::vector<std::uint8_t>;

enum class Mod { Bpsk, Qam4, Qam8, Qam16 };
enum class Scheme { Prpp, Sm, PrppSm, Pim, PimSm };
enum class DetectorKind { Ml, Las };

std::string mod_name(Mod m);
std::string scheme_name(Scheme s);
Mod mod_from_name(const std::string& name);        // throws on unknown name
Scheme scheme_from_name(const std::string& name);  // throws on unknown name

struct Alphabet {
    Mod name = Mod::Bpsk;
    std::vector<Cplx> points;  // indexed by the bit-chunk value
    int bits_per_symbol = 1;

    int size() const { return static_cast<int>(points.size()); }
};

Alphabet make_alphabet(Mod name);

/// Chunked bit-to-symbol map; |bits| must be a multiple of bits_per_symbol.
CVec map_bits(const Bits& bits, const Alphabet& a);

/// Inverse of map_bits. Every entry must match an alphabet point to within
/// 1e-9, otherwise the entry is rejected.
Bits demap_symbols(const CVec& v, const Alphabet& a);

/// Index of the closest alphabet point (no tolerance; used to quantize soft
/// estimates before LAS).
int nearest_point(const Alphabet& a, Cplx z);

/// One simulated link configuration. n_rf is implied: one transmit RF chain
/// for the SM family and PRPP, n_t (= 1) for PIM.
struct SchemeConfig {
    Scheme scheme = Scheme::Prpp;
    int p = 1;    // block length in channel uses
    int n_t = 1;  // transmit antennas
    int n_r = 1;  // receive antennas
    int n_p = 1;  // precoder columns per block (PIM family)
    Mod alphabet = Mod::Bpsk;
    std::uint64_t seed = 1;
    DetectorKind detector = DetectorKind::Ml;

    int n_rf() const { return scheme == Scheme::Pim ? n_t : 1; }

    /// Throws std::invalid_argument on an inconsistent combination
    /// (non-power-of-two fan-outs, n_p outside the PIM family, ...).
    void validate() const;

    bool operator==(const SchemeConfig&) const = default;
};

/// Bits per channel use conveyed by the configured scheme. Fan-outs are
/// validated as powers of two, so the floor terms are exact.
int spectral_efficiency(const SchemeConfig& cfg);

}  // namespace pimsim
