// SPDX-License-Identifier: Apache-2.0
//
// Complex scalars, small dense complex matrices, and the seeded PRNG shared
// by transmitter and receiver models. The generator is pinned to SplitMix64
// so that a pre-shared seed reproduces identical phase/noise streams on both
// sides, bit for bit.

#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pimsim {

using Cplx = std::complex<double>;
using CVec = std::vector<Cplx>;

struct SingularMatrix : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// (u / 2^64) * 2*pi, uniform on [0, 2*pi)
double phase_from_u64(std::uint64_t u);

// plain complex multiply written out so hot loops compile to straight FP ops
inline Cplx cmul(Cplx a, Cplx b) {
    return {a.real() * b.real() - a.imag() * b.imag(),
            a.real() * b.imag() + a.imag() * b.real()};
}
inline Cplx cmul_conj(Cplx a, Cplx b) {  // conj(a) * b
    return {a.real() * b.real() + a.imag() * b.imag(),
            a.real() * b.imag() - a.imag() * b.real()};
}
inline double abs_sq(Cplx a) {
    return a.real() * a.real() + a.imag() * a.imag();
}

}  // namespace detail

/// SplitMix64 generator advanced as an owned value. Equal states yield equal
/// output streams of any length.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    /// Uniform phase in [0, 2*pi).
    double next_phase() { return detail::phase_from_u64(next_u64()); }

    /// Circularly symmetric complex Gaussian, CN(0, variance). Box-Muller on
    /// two uniform draws; real part from the cos branch, imaginary from sin,
    /// first uniform guarded away from zero.
    Cplx next_gaussian_cplx(double variance);

    std::uint64_t state() const { return state_; }

  private:
    std::uint64_t state_;
};

/// Pinned seed mix for counter-derived streams: SplitMix64 output of
/// (master XOR rotl(k,17) XOR rotl(stream,43)). Lets any trial or material
/// stream be regenerated in isolation.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t k, std::uint64_t stream);

/// Dense row-major complex matrix. Dimensions in this toolkit stay small
/// (at most a few thousand entries per axis), so no sparse or blocked storage.
class CMat {
  public:
    CMat() = default;
    CMat(int rows, int cols) : rows_(rows), cols_(cols), e_(static_cast<std::size_t>(rows) * cols) {}
    CMat(int rows, int cols, CVec entries);

    static CMat identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Cplx& operator()(int r, int c) { return e_[static_cast<std::size_t>(r) * cols_ + c]; }
    Cplx operator()(int r, int c) const { return e_[static_cast<std::size_t>(r) * cols_ + c]; }

    Cplx* data() { return e_.data(); }
    const Cplx* data() const { return e_.data(); }
    const CVec& entries() const { return e_; }

    bool operator==(const CMat&) const = default;

  private:
    int rows_ = 0;
    int cols_ = 0;
    CVec e_;
};

CVec matvec(const CMat& m, const CVec& v);
CMat matmul(const CMat& a, const CMat& b);
CMat hermitian(const CMat& m);
double frob_norm(const CMat& m);
double norm_sq(const CVec& v);
double sub_norm_sq(const CVec& a, const CVec& b);  // ||a - b||^2

/// Gaussian elimination with partial pivoting. Reports singularity when the
/// best pivot magnitude drops below 1e-12.
CVec solve_linear(const CMat& a, const CVec& b);

}  // namespace pimsim
