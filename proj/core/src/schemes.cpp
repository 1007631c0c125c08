// SPDX-License-Identifier: Apache-2.0

#include "pimsim/schemes.hpp"

#include <bit>
#include <cmath>

namespace pimsim {

namespace {

constexpr std::uint64_t kPrecoderStream = 0x70686173655f7374ull;  // P matrix phases
constexpr std::uint64_t kSetStream = 0x7365745f73747265ull;       // Q matrix phases

int log2_exact(int v) { return std::countr_zero(static_cast<unsigned>(v)); }

std::uint64_t sat_pow(std::uint64_t base, int exp) {
    std::uint64_t r = 1;
    for (int i = 0; i < exp; ++i) {
        if (base != 0 && r > UINT64_MAX / base) return UINT64_MAX;
        r *= base;
    }
    return r;
}

std::uint64_t take_chunk(const Bits& bits, std::size_t& pos, int width) {
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v = (v << 1) | (bits[pos++] & 1);
    return v;
}

void push_chunk(Bits& bits, std::uint64_t v, int width) {
    for (int i = width - 1; i >= 0; --i) bits.push_back(static_cast<std::uint8_t>((v >> i) & 1));
}

}  // namespace

PhasePrecoder build_prpp(int rows, int cols, std::uint64_t seed) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("build_prpp: dimensions must be >= 1");
    PhasePrecoder p;
    p.rows = rows;
    p.cols = cols;
    p.seed = seed;
    p.matrix = CMat(rows, cols);
    Rng rng(seed);
    const double mag = 1.0 / std::sqrt(static_cast<double>(rows));
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const double theta = rng.next_phase();
            p.matrix(r, c) = {mag * std::cos(theta), mag * std::sin(theta)};
        }
    }
    return p;
}

CMat expand_activation(const ActivationPattern& pat) {
    if (static_cast<int>(pat.indices.size()) != pat.p) {
        throw std::invalid_argument("activation pattern: index count != p");
    }
    CMat a(pat.p * pat.fan, pat.p);
    for (int i = 0; i < pat.p; ++i) {
        const int j = pat.indices[i];
        if (j < 1 || j > pat.fan) throw std::out_of_range("activation pattern: index out of range");
        a(i * pat.fan + (j - 1), i) = 1.0;
    }
    return a;
}

ActivationPattern pattern_from_bits(const Bits& bits, int p, int fan) {
    const int width = log2_exact(fan);
    if (bits.size() != static_cast<std::size_t>(p) * width) {
        throw std::invalid_argument("pattern_from_bits: bit count != p*log2(fan)");
    }
    ActivationPattern pat;
    pat.p = p;
    pat.fan = fan;
    pat.indices.resize(p);
    std::size_t pos = 0;
    for (int i = 0; i < p; ++i) pat.indices[i] = static_cast<int>(take_chunk(bits, pos, width)) + 1;
    return pat;
}

Bits bits_from_pattern(const ActivationPattern& pat) {
    const int width = log2_exact(pat.fan);
    Bits bits;
    bits.reserve(static_cast<std::size_t>(pat.p) * width);
    for (int i = 0; i < pat.p; ++i) push_chunk(bits, static_cast<std::uint64_t>(pat.indices[i] - 1), width);
    return bits;
}

std::uint64_t PrecoderSet::member_count() const { return sat_pow(static_cast<std::uint64_t>(n_p), p); }

PrecoderSet build_precoder_set(int p, int n_p, std::uint64_t seed) {
    if (p < 1) throw std::invalid_argument("build_precoder_set: p must be >= 1");
    if (!std::has_single_bit(static_cast<unsigned>(n_p))) {
        throw std::invalid_argument("build_precoder_set: n_p must be a power of two");
    }
    if (static_cast<std::uint64_t>(p) * log2_exact(n_p) > 63) {
        throw std::overflow_error("build_precoder_set: n_p^p exceeds the 64-bit index range");
    }
    PrecoderSet set;
    set.p = p;
    set.n_p = n_p;
    set.q = build_prpp(p, p * n_p, seed);
    return set;
}

ActivationPattern pattern_of_precoder_index(int p, int n_p, std::uint64_t j) {
    ActivationPattern pat;
    pat.p = p;
    pat.fan = n_p;
    pat.indices.resize(p);
    for (int i = p - 1; i >= 0; --i) {
        pat.indices[i] = static_cast<int>(j % n_p) + 1;
        j /= n_p;
    }
    return pat;
}

std::uint64_t precoder_index_of_pattern(const ActivationPattern& pat) {
    std::uint64_t j = 0;
    for (int i = 0; i < pat.p; ++i) j = j * pat.fan + static_cast<std::uint64_t>(pat.indices[i] - 1);
    return j;
}

CMat select_precoder(const PrecoderSet& set, std::uint64_t j) {
    if (j >= set.member_count()) throw std::out_of_range("select_precoder: index out of range");
    const ActivationPattern digits = pattern_of_precoder_index(set.p, set.n_p, j);
    CMat out(set.p, set.p);
    for (int c = 0; c < set.p; ++c) {
        const int qcol = c * set.n_p + (digits.indices[c] - 1);
        for (int r = 0; r < set.p; ++r) out(r, c) = set.q.matrix(r, qcol);
    }
    return out;
}

SchemeMaterials make_materials(const SchemeConfig& cfg) {
    cfg.validate();
    SchemeMaterials m;
    const std::uint64_t p_seed = mix_seed(cfg.seed, 1, kPrecoderStream);
    const std::uint64_t q_seed = mix_seed(cfg.seed, 2, kSetStream);
    switch (cfg.scheme) {
        case Scheme::Prpp:
            m.prpp = build_prpp(cfg.p, cfg.p, p_seed);
            break;
        case Scheme::Sm:
            break;  // no precoding
        case Scheme::PrppSm:
            m.prpp = build_prpp(cfg.p, cfg.p * cfg.n_t, p_seed);
            break;
        case Scheme::Pim:
            m.set = build_precoder_set(cfg.p, cfg.n_p, q_seed);
            break;
        case Scheme::PimSm:
            m.prpp = build_prpp(cfg.p, cfg.p * cfg.n_t, p_seed);
            m.set = build_precoder_set(cfg.p, cfg.n_p, q_seed);
            break;
    }
    return m;
}

TxHypothesis encode(const SchemeConfig& cfg, const Bits& bits) {
    cfg.validate();
    const Alphabet alph = make_alphabet(cfg.alphabet);
    const std::size_t expected = static_cast<std::size_t>(cfg.p) * spectral_efficiency(cfg);
    if (bits.size() != expected) throw std::invalid_argument("encode: bit count != p * spectral efficiency");

    TxHypothesis hyp;
    std::size_t pos = 0;
    if (cfg.scheme == Scheme::Pim || cfg.scheme == Scheme::PimSm) {
        const int width = cfg.p * log2_exact(cfg.n_p);
        hyp.precoder_index = take_chunk(bits, pos, width);
    }
    if (cfg.scheme == Scheme::Sm || cfg.scheme == Scheme::PrppSm || cfg.scheme == Scheme::PimSm) {
        const int width = log2_exact(cfg.n_t);
        Bits ant(bits.begin() + pos, bits.begin() + pos + static_cast<std::size_t>(cfg.p) * width);
        pos += ant.size();
        hyp.antenna_pattern = pattern_from_bits(ant, cfg.p, cfg.n_t);
    }
    Bits mod(bits.begin() + pos, bits.end());
    hyp.symbols = map_bits(mod, alph);
    return hyp;
}

Bits decode_bits(const SchemeConfig& cfg, const TxHypothesis& hyp) {
    const Alphabet alph = make_alphabet(cfg.alphabet);
    Bits bits;
    if (cfg.scheme == Scheme::Pim || cfg.scheme == Scheme::PimSm) {
        push_chunk(bits, hyp.precoder_index.value(), cfg.p * log2_exact(cfg.n_p));
    }
    if (cfg.scheme == Scheme::Sm || cfg.scheme == Scheme::PrppSm || cfg.scheme == Scheme::PimSm) {
        const Bits ant = bits_from_pattern(hyp.antenna_pattern.value());
        bits.insert(bits.end(), ant.begin(), ant.end());
    }
    const Bits mod = demap_symbols(hyp.symbols, alph);
    bits.insert(bits.end(), mod.begin(), mod.end());
    return bits;
}

TxSignal transmit_signal(const SchemeConfig& cfg, const TxHypothesis& hyp, const SchemeMaterials& mats) {
    cfg.validate();
    TxSignal sig;
    sig.antenna.assign(cfg.p, 1);
    sig.amplitude.assign(cfg.p, Cplx{});

    switch (cfg.scheme) {
        case Scheme::Prpp: {
            if (!mats.prpp) throw std::invalid_argument("transmit_signal: PRPP needs a phase precoder");
            sig.amplitude = matvec(mats.prpp->matrix, hyp.symbols);
            break;
        }
        case Scheme::Sm: {
            const ActivationPattern& pat = hyp.antenna_pattern.value();
            sig.antenna[0] = pat.indices[0];
            sig.amplitude[0] = hyp.symbols[0];
            break;
        }
        case Scheme::PrppSm: {
            if (!mats.prpp) throw std::invalid_argument("transmit_signal: PRPP-SM needs a phase precoder");
            const ActivationPattern& pat = hyp.antenna_pattern.value();
            const CVec spread = matvec(mats.prpp->matrix, matvec(expand_activation(pat), hyp.symbols));
            sig.antenna.assign(pat.indices.begin(), pat.indices.end());
            sig.amplitude = spread;
            break;
        }
        case Scheme::Pim: {
            if (!mats.set) throw std::invalid_argument("transmit_signal: PIM needs a precoder set");
            const CMat pj = select_precoder(*mats.set, hyp.precoder_index.value());
            sig.amplitude = matvec(pj, hyp.symbols);
            break;
        }
        case Scheme::PimSm: {
            if (!mats.prpp || !mats.set) throw std::invalid_argument("transmit_signal: PIM-SM needs P and Q");
            const ActivationPattern& pat = hyp.antenna_pattern.value();
            const CMat pj = select_precoder(*mats.set, hyp.precoder_index.value());
            const CVec precoded = matvec(pj, hyp.symbols);
            const CVec spread = matvec(mats.prpp->matrix, matvec(expand_activation(pat), precoded));
            sig.antenna.assign(pat.indices.begin(), pat.indices.end());
            sig.amplitude = spread;
            break;
        }
    }
    return sig;
}

std::uint64_t hypothesis_space_size(const SchemeConfig& cfg) {
    cfg.validate();
    const std::uint64_t m = static_cast<std::uint64_t>(make_alphabet(cfg.alphabet).size());
    switch (cfg.scheme) {
        case Scheme::Prpp: return sat_pow(m, cfg.p);
        case Scheme::Sm: return static_cast<std::uint64_t>(cfg.n_t) * m;
        case Scheme::PrppSm: {
            const std::uint64_t a = sat_pow(static_cast<std::uint64_t>(cfg.n_t), cfg.p);
            const std::uint64_t s = sat_pow(m, cfg.p);
            return (a != 0 && s > UINT64_MAX / a) ? UINT64_MAX : a * s;
        }
        case Scheme::Pim: {
            const std::uint64_t j = sat_pow(static_cast<std::uint64_t>(cfg.n_p), cfg.p);
            const std::uint64_t s = sat_pow(m, cfg.p);
            return (j != 0 && s > UINT64_MAX / j) ? UINT64_MAX : j * s;
        }
        case Scheme::PimSm: {
            const std::uint64_t a = sat_pow(static_cast<std::uint64_t>(cfg.n_t), cfg.p);
            const std::uint64_t j = sat_pow(static_cast<std::uint64_t>(cfg.n_p), cfg.p);
            if (a != 0 && j > UINT64_MAX / a) return UINT64_MAX;
            const std::uint64_t aj = a * j;
            const std::uint64_t s = sat_pow(m, cfg.p);
            return (aj != 0 && s > UINT64_MAX / aj) ? UINT64_MAX : aj * s;
        }
    }
    throw std::invalid_argument("unknown scheme");
}

}  // namespace pimsim
