// SPDX-License-Identifier: Apache-2.0

#include "pimsim/numerics.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace pimsim {

namespace detail {

double phase_from_u64(std::uint64_t u) {
    // 2^-64 as a double; the product stays strictly below 2*pi
    constexpr double kScale = 5.421010862427522e-20;
    return static_cast<double>(u) * kScale * (2.0 * std::numbers::pi);
}

}  // namespace detail

Cplx Rng::next_gaussian_cplx(double variance) {
    if (!(variance > 0.0)) {
        throw std::invalid_argument("gaussian draw requires variance > 0");
    }
    constexpr double kInv64 = 5.421010862427522e-20;
    // u1 in (0, 1]: log stays finite
    const double u1 = (static_cast<double>(next_u64()) + 1.0) * kInv64;
    const double u2 = static_cast<double>(next_u64()) * kInv64;
    const double r = std::sqrt(-2.0 * std::log(u1)) * std::sqrt(variance / 2.0);
    const double a = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(a), r * std::sin(a)};
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t k, std::uint64_t stream) {
    return Rng(master ^ std::rotl(k, 17) ^ std::rotl(stream, 43)).next_u64();
}

CMat::CMat(int rows, int cols, CVec entries) : rows_(rows), cols_(cols), e_(std::move(entries)) {
    if (e_.size() != static_cast<std::size_t>(rows) * cols) {
        throw std::invalid_argument("matrix entry count does not match dimensions");
    }
}

CMat CMat::identity(int n) {
    CMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CVec matvec(const CMat& m, const CVec& v) {
    if (v.size() != static_cast<std::size_t>(m.cols())) {
        throw std::invalid_argument("matvec: dimension mismatch");
    }
    CVec out(m.rows(), Cplx{});
    const Cplx* e = m.data();
    for (int r = 0; r < m.rows(); ++r) {
        Cplx acc{};
        for (int c = 0; c < m.cols(); ++c) acc += detail::cmul(e[static_cast<std::size_t>(r) * m.cols() + c], v[c]);
        out[r] = acc;
    }
    return out;
}

CMat matmul(const CMat& a, const CMat& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: dimension mismatch");
    CMat out(a.rows(), b.cols());
    for (int r = 0; r < a.rows(); ++r) {
        for (int k = 0; k < a.cols(); ++k) {
            const Cplx arK = a(r, k);
            if (arK == Cplx{}) continue;
            for (int c = 0; c < b.cols(); ++c) out(r, c) += detail::cmul(arK, b(k, c));
        }
    }
    return out;
}

CMat hermitian(const CMat& m) {
    CMat out(m.cols(), m.rows());
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) out(c, r) = std::conj(m(r, c));
    return out;
}

double frob_norm(const CMat& m) {
    double s = 0.0;
    for (const Cplx& z : m.entries()) s += detail::abs_sq(z);
    return std::sqrt(s);
}

double norm_sq(const CVec& v) {
    double s = 0.0;
    for (const Cplx& z : v) s += detail::abs_sq(z);
    return s;
}

double sub_norm_sq(const CVec& a, const CVec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("sub_norm_sq: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += detail::abs_sq(a[i] - b[i]);
    return s;
}

CVec solve_linear(const CMat& a, const CVec& b) {
    if (a.rows() != a.cols()) throw std::invalid_argument("solve_linear: matrix must be square");
    if (b.size() != static_cast<std::size_t>(a.rows())) {
        throw std::invalid_argument("solve_linear: rhs length mismatch");
    }
    const int n = a.rows();
    CMat m = a;
    CVec x = b;
    constexpr double kPivotFloor = 1e-12;

    for (int col = 0; col < n; ++col) {
        int pivot = col;
        double best = std::abs(m(col, col));
        for (int r = col + 1; r < n; ++r) {
            const double mag = std::abs(m(r, col));
            if (mag > best) {
                best = mag;
                pivot = r;
            }
        }
        if (best < kPivotFloor) {
            throw SingularMatrix("solve_linear: pivot magnitude below 1e-12 at column " + std::to_string(col));
        }
        if (pivot != col) {
            for (int c = col; c < n; ++c) std::swap(m(pivot, c), m(col, c));
            std::swap(x[pivot], x[col]);
        }
        const Cplx inv = 1.0 / m(col, col);
        for (int r = col + 1; r < n; ++r) {
            const Cplx f = m(r, col) * inv;
            if (f == Cplx{}) continue;
            m(r, col) = 0.0;
            for (int c = col + 1; c < n; ++c) m(r, c) -= f * m(col, c);
            x[r] -= f * x[col];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        Cplx acc = x[r];
        for (int c = r + 1; c < n; ++c) acc -= m(r, c) * x[c];
        x[r] = acc / m(r, r);
    }
    return x;
}

}  // namespace pimsim
