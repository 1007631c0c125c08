// SPDX-License-Identifier: Apache-2.0

#include "pimsim/modem.hpp"

#include <bit>
#include <cmath>
#include <limits>

namespace pimsim {

namespace {

bool is_pow2(int v) { return v >= 1 && std::has_single_bit(static_cast<unsigned>(v)); }

int log2_exact(int v) { return std::countr_zero(static_cast<unsigned>(v)); }

// Gray-labeled PAM axis with 2^bits levels: index 0 sits on the positive
// end and adjacent levels differ in exactly one index bit.
double axis_level(int index, int bits) {
    int pos = index;
    for (int shift = 1; shift < bits; shift <<= 1) pos ^= pos >> shift;  // Gray decode
    const int levels = 1 << bits;
    return static_cast<double>(levels - 1 - 2 * pos);
}

Alphabet grid_alphabet(Mod name, int i_bits, int q_bits) {
    Alphabet a;
    a.name = name;
    a.bits_per_symbol = i_bits + q_bits;
    const int n = 1 << a.bits_per_symbol;
    a.points.resize(n);
    double energy = 0.0;
    for (int idx = 0; idx < n; ++idx) {
        const double re = axis_level(idx >> q_bits, i_bits);
        const double im = q_bits > 0 ? axis_level(idx & ((1 << q_bits) - 1), q_bits) : 0.0;
        a.points[idx] = {re, im};
        energy += re * re + im * im;
    }
    const double scale = std::sqrt(static_cast<double>(n) / energy);
    for (Cplx& z : a.points) z *= scale;
    return a;
}

}  // namespace

std::string mod_name(Mod m) {
    switch (m) {
        case Mod::Bpsk: return "bpsk";
        case Mod::Qam4: return "qam4";
        case Mod::Qam8: return "qam8";
        case Mod::Qam16: return "qam16";
    }
    return "?";
}

std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::Prpp: return "prpp";
        case Scheme::Sm: return "sm";
        case Scheme::PrppSm: return "prpp-sm";
        case Scheme::Pim: return "pim";
        case Scheme::PimSm: return "pim-sm";
    }
    return "?";
}

Mod mod_from_name(const std::string& name) {
    if (name == "bpsk") return Mod::Bpsk;
    if (name == "qam4") return Mod::Qam4;
    if (name == "qam8") return Mod::Qam8;
    if (name == "qam16") return Mod::Qam16;
    throw std::invalid_argument("unknown modulation: " + name);
}

Scheme scheme_from_name(const std::string& name) {
    if (name == "prpp") return Scheme::Prpp;
    if (name == "sm") return Scheme::Sm;
    if (name == "prpp-sm") return Scheme::PrppSm;
    if (name == "pim") return Scheme::Pim;
    if (name == "pim-sm") return Scheme::PimSm;
    throw std::invalid_argument("unknown scheme: " + name);
}

Alphabet make_alphabet(Mod name) {
    switch (name) {
        case Mod::Bpsk: return grid_alphabet(name, 1, 0);
        case Mod::Qam4: return grid_alphabet(name, 1, 1);
        case Mod::Qam8: return grid_alphabet(name, 2, 1);  // rectangular 4x2
        case Mod::Qam16: return grid_alphabet(name, 2, 2);
    }
    throw std::invalid_argument("unsupported alphabet");
}

CVec map_bits(const Bits& bits, const Alphabet& a) {
    const int bps = a.bits_per_symbol;
    if (bits.size() % bps != 0) throw std::invalid_argument("map_bits: bit count not a multiple of bits/symbol");
    CVec out(bits.size() / bps);
    for (std::size_t s = 0; s < out.size(); ++s) {
        int idx = 0;
        for (int b = 0; b < bps; ++b) idx = (idx << 1) | (bits[s * bps + b] & 1);
        out[s] = a.points[idx];
    }
    return out;
}

Bits demap_symbols(const CVec& v, const Alphabet& a) {
    const int bps = a.bits_per_symbol;
    Bits out;
    out.reserve(v.size() * bps);
    for (const Cplx& z : v) {
        int match = -1;
        for (int idx = 0; idx < a.size(); ++idx) {
            if (std::abs(z - a.points[idx]) <= 1e-9) {
                match = idx;
                break;
            }
        }
        if (match < 0) throw std::invalid_argument("demap_symbols: entry is not an alphabet point");
        for (int b = bps - 1; b >= 0; --b) out.push_back(static_cast<std::uint8_t>((match >> b) & 1));
    }
    return out;
}

int nearest_point(const Alphabet& a, Cplx z) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int idx = 0; idx < a.size(); ++idx) {
        const double d = detail::abs_sq(z - a.points[idx]);
        if (d < best_d) {
            best_d = d;
            best = idx;
        }
    }
    return best;
}

void SchemeConfig::validate() const {
    if (p < 1) throw std::invalid_argument("p must be >= 1");
    if (n_r < 1) throw std::invalid_argument("n_r must be >= 1");
    if (n_t < 1 || n_p < 1) throw std::invalid_argument("n_t and n_p must be >= 1");

    const bool uses_antenna_index = scheme == Scheme::Sm || scheme == Scheme::PrppSm || scheme == Scheme::PimSm;
    const bool uses_precoder_index = scheme == Scheme::Pim || scheme == Scheme::PimSm;

    if (uses_antenna_index) {
        if (!is_pow2(n_t)) throw std::invalid_argument("n_t must be a power of two");
    } else if (n_t != 1) {
        throw std::invalid_argument("n_t applies only to SM-family schemes");
    }
    if (uses_precoder_index) {
        if (!is_pow2(n_p)) throw std::invalid_argument("n_p must be a power of two");
    } else if (n_p != 1) {
        throw std::invalid_argument("n_p applies only to PIM-family schemes");
    }
    // SM carries no block structure; each channel use is detected on its own.
    if (scheme == Scheme::Sm && p != 1) throw std::invalid_argument("SM runs with p = 1");
    if (detector == DetectorKind::Las) {
        if (scheme != Scheme::Prpp) throw std::invalid_argument("LAS detection is available for PRPP only");
        if (alphabet != Mod::Bpsk && alphabet != Mod::Qam4) {
            throw std::invalid_argument("LAS detection supports BPSK and 4-QAM only");
        }
    }
}

int spectral_efficiency(const SchemeConfig& cfg) {
    cfg.validate();
    const int mod_bits = make_alphabet(cfg.alphabet).bits_per_symbol;
    switch (cfg.scheme) {
        case Scheme::Prpp: return mod_bits;
        case Scheme::Sm: return mod_bits + log2_exact(cfg.n_t);
        case Scheme::PrppSm: return mod_bits + log2_exact(cfg.n_t);
        case Scheme::Pim: return mod_bits + log2_exact(cfg.n_p);
        case Scheme::PimSm: return mod_bits + log2_exact(cfg.n_p) + log2_exact(cfg.n_t);
    }
    throw std::invalid_argument("unknown scheme");
}

}  // namespace pimsim
