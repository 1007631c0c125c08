// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>

#include "pimsim/modem.hpp"
#include "support/test_support.hpp"

using namespace pimsim;
using pimsim::testing::bits_of;
using pimsim::testing::random_bits;

namespace {

double min_distance(const Alphabet& a) {
    double best = 1e300;
    for (int i = 0; i < a.size(); ++i)
        for (int j = i + 1; j < a.size(); ++j) best = std::min(best, std::abs(a.points[i] - a.points[j]));
    return best;
}

int bit_diff(int a, int b) { return std::popcount(static_cast<unsigned>(a ^ b)); }

}  // namespace

TEST_CASE("bpsk convention") {
    const Alphabet a = make_alphabet(Mod::Bpsk);
    CHECK(a.points[0] == Cplx{1.0, 0.0});
    CHECK(a.points[1] == Cplx{-1.0, 0.0});
    CHECK(map_bits({0, 1, 0}, a) == CVec{{1, 0}, {-1, 0}, {1, 0}});
}

TEST_CASE("4-qam point listing and scale") {
    const Alphabet a = make_alphabet(Mod::Qam4);
    const double s = 1.0 / std::sqrt(2.0);
    REQUIRE(a.size() == 4);
    CHECK(std::abs(a.points[0] - Cplx{s, s}) <= 1e-15);    // 00 -> +1+j
    CHECK(std::abs(a.points[1] - Cplx{s, -s}) <= 1e-15);   // 01 -> +1-j
    CHECK(std::abs(a.points[2] - Cplx{-s, s}) <= 1e-15);   // 10 -> -1+j
    CHECK(std::abs(a.points[3] - Cplx{-s, -s}) <= 1e-15);  // 11 -> -1-j
}

TEST_CASE("all alphabets have unit average energy and distinct points") {
    for (Mod m : {Mod::Bpsk, Mod::Qam4, Mod::Qam8, Mod::Qam16}) {
        const Alphabet a = make_alphabet(m);
        CHECK(a.size() == (1 << a.bits_per_symbol));
        double e = 0.0;
        for (const Cplx& z : a.points) e += std::norm(z);
        CHECK(std::abs(e / a.size() - 1.0) <= 1e-12);
        for (int i = 0; i < a.size(); ++i)
            for (int j = i + 1; j < a.size(); ++j) CHECK(a.points[i] != a.points[j]);
    }
}

TEST_CASE("gray labeling: minimum-distance neighbors differ in one bit") {
    for (Mod m : {Mod::Bpsk, Mod::Qam4, Mod::Qam16}) {
        const Alphabet a = make_alphabet(m);
        const double dmin = min_distance(a);
        for (int i = 0; i < a.size(); ++i) {
            for (int j = i + 1; j < a.size(); ++j) {
                if (std::abs(a.points[i] - a.points[j]) <= dmin * (1.0 + 1e-9)) {
                    CHECK(bit_diff(i, j) == 1);
                }
            }
        }
    }
}

TEST_CASE("map/demap are mutually inverse") {
    CHECK(map_bits({}, make_alphabet(Mod::Bpsk)).empty());

    // exhaustive for the small alphabets on blocks up to 8 bits
    for (Mod m : {Mod::Bpsk, Mod::Qam4}) {
        const Alphabet a = make_alphabet(m);
        for (int width = a.bits_per_symbol; width <= 8; width += a.bits_per_symbol) {
            for (std::uint64_t v = 0; v < (1ull << width); ++v) {
                const Bits b = bits_of(v, width);
                CHECK(demap_symbols(map_bits(b, a), a) == b);
            }
        }
    }
    // randomized for the larger ones
    Rng rng(3);
    for (Mod m : {Mod::Qam8, Mod::Qam16}) {
        const Alphabet a = make_alphabet(m);
        for (int t = 0; t < 200; ++t) {
            const Bits b = random_bits(rng, a.bits_per_symbol * 6);
            CHECK(demap_symbols(map_bits(b, a), a) == b);
        }
    }
}

TEST_CASE("map/demap error paths") {
    const Alphabet a = make_alphabet(Mod::Qam4);
    CHECK_THROWS_AS(map_bits({0, 1, 0}, a), std::invalid_argument);
    CHECK_THROWS_AS(demap_symbols({Cplx{0.5, 0.0}}, make_alphabet(Mod::Bpsk)), std::invalid_argument);
    CHECK(demap_symbols({Cplx{1.0 + 1e-10, 0.0}}, make_alphabet(Mod::Bpsk)) == Bits{0});
}

TEST_CASE("nearest_point quantizes") {
    const Alphabet a = make_alphabet(Mod::Bpsk);
    CHECK(nearest_point(a, {0.2, 0.7}) == 0);
    CHECK(nearest_point(a, {-0.1, 0.0}) == 1);
}

TEST_CASE("spectral efficiency of the documented configurations") {
    SchemeConfig sm;
    sm.scheme = Scheme::Sm;
    sm.n_t = 2;
    sm.alphabet = Mod::Qam8;
    CHECK(spectral_efficiency(sm) == 4);

    SchemeConfig pim;
    pim.scheme = Scheme::Pim;
    pim.p = 5;
    pim.n_p = 4;
    pim.alphabet = Mod::Qam4;
    CHECK(spectral_efficiency(pim) == 4);

    SchemeConfig pimsm;
    pimsm.scheme = Scheme::PimSm;
    pimsm.p = 5;
    pimsm.n_t = 4;
    pimsm.n_p = 2;
    pimsm.alphabet = Mod::Bpsk;
    CHECK(spectral_efficiency(pimsm) == 4);
}

TEST_CASE("spectral efficiency across the parameter grid") {
    auto lg = [](int v) {
        int b = 0;
        while ((1 << (b + 1)) <= v) ++b;
        return b;
    };
    for (Mod m : {Mod::Bpsk, Mod::Qam4, Mod::Qam8, Mod::Qam16}) {
        const int mb = make_alphabet(m).bits_per_symbol;
        for (int nt : {1, 2, 4, 8}) {
            for (int np : {1, 2, 4, 8}) {
                SchemeConfig c;
                c.alphabet = m;
                c.p = 3;

                c.scheme = Scheme::Prpp;
                CHECK(spectral_efficiency(c) == mb);

                c.scheme = Scheme::Sm;
                c.p = 1;
                c.n_t = nt;
                CHECK(spectral_efficiency(c) == mb + lg(nt));

                c.scheme = Scheme::PrppSm;
                c.p = 3;
                CHECK(spectral_efficiency(c) == mb + lg(nt));

                c.scheme = Scheme::Pim;
                c.n_t = 1;
                c.n_p = np;
                CHECK(spectral_efficiency(c) == mb + lg(np));

                c.scheme = Scheme::PimSm;
                c.n_t = nt;
                CHECK(spectral_efficiency(c) == mb + lg(np) + lg(nt));
                c.n_t = 1;
                c.n_p = 1;
            }
        }
    }
}

TEST_CASE("config validation rejects inconsistent combinations") {
    SchemeConfig c;
    c.scheme = Scheme::Sm;
    c.p = 1;
    c.n_t = 3;  // not a power of two
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);

    c.n_t = 4;
    c.n_p = 2;  // n_p outside the PIM family
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);

    c.n_p = 1;
    c.p = 2;  // SM is per channel use
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);

    SchemeConfig las;
    las.scheme = Scheme::Sm;
    las.n_t = 2;
    las.detector = DetectorKind::Las;
    CHECK_THROWS_AS(las.validate(), std::invalid_argument);

    las.scheme = Scheme::Prpp;
    las.n_t = 1;
    las.alphabet = Mod::Qam16;
    CHECK_THROWS_AS(las.validate(), std::invalid_argument);
    las.alphabet = Mod::Qam4;
    CHECK_NOTHROW(las.validate());

    SchemeConfig prpp;
    prpp.scheme = Scheme::Prpp;
    prpp.n_t = 2;  // PRPP is single-antenna
    CHECK_THROWS_AS(prpp.validate(), std::invalid_argument);
}
