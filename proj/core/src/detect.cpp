// SPDX-License-Identifier: Apache-2.0

#include "pimsim/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pimsim {

namespace {

using detail::abs_sq;
using detail::cmul;
using detail::cmul_conj;

// Resync the incremental caches from scratch every so often to keep
// floating-point drift below test tolerances on long walks.
constexpr std::uint64_t kResyncMask = 0xFFF;

std::uint64_t pow_u64(std::uint64_t base, int exp) {
    std::uint64_t r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

struct WalkBest {
    double metric;
    std::uint64_t index;  // natural (bit-image) rank of the symbol vector
};

// Scratch shared across the inner enumerations of one detection call.
struct Scratch {
    std::vector<std::uint8_t> digits;
    std::vector<Cplx> z;
    std::vector<Cplx> x;
};

// Walk all |A|^p symbol vectors in natural (bit-image) order. The metric is
// carried incrementally: changing coordinate c by delta costs
//   m += -2*Re(conj(delta)*z_c) + |delta|^2 * gram_cc,   z -= gram[:,c]*delta,
// where z = G^H(y - Gx) and gram = G^H G. `w` is G^H y, used with |y|^2 to
// resynchronize the caches periodically.
WalkBest walk_symbols(int p, const Alphabet& alph, const Cplx* gram, const Cplx* z0, double m0, const Cplx* w,
                      double y2, Scratch& s, std::uint64_t& evals) {
    const int m = alph.size();
    const Cplx* pts = alph.points.data();
    const std::uint64_t total = pow_u64(static_cast<std::uint64_t>(m), p);

    s.digits.assign(p, 0);
    s.z.assign(z0, z0 + p);
    s.x.assign(p, pts[0]);
    Cplx* z = s.z.data();
    Cplx* x = s.x.data();
    std::uint8_t* dig = s.digits.data();

    double metric = m0;
    WalkBest best{m0, 0};
    ++evals;

    auto apply = [&](int c, Cplx to) {
        const Cplx delta = to - x[c];
        metric += -2.0 * (delta.real() * z[c].real() + delta.imag() * z[c].imag()) + abs_sq(delta) * gram[c * p + c].real();
        for (int d = 0; d < p; ++d) z[d] -= cmul(gram[d * p + c], delta);
        x[c] = to;
    };

    for (std::uint64_t t = 1; t < total; ++t) {
        int c = p - 1;
        while (dig[c] == m - 1) {
            apply(c, pts[0]);
            dig[c] = 0;
            --c;
        }
        ++dig[c];
        apply(c, pts[dig[c]]);

        if ((t & kResyncMask) == 0) {
            // z = w - gram*x ; metric = |y|^2 - 2*Re(x^H w) + x^H gram x
            double quad = 0.0, cross = 0.0;
            for (int a = 0; a < p; ++a) {
                Cplx acc{};
                for (int b = 0; b < p; ++b) acc += cmul(gram[a * p + b], x[b]);
                z[a] = w[a] - acc;
                quad += cmul_conj(x[a], acc).real();
                cross += cmul_conj(x[a], w[a]).real();
            }
            metric = y2 - 2.0 * cross + quad;
        }

        ++evals;
        if (metric < best.metric) best = {metric, t};
    }
    return best;
}

void symbols_of_rank(std::uint64_t t, int p, const Alphabet& alph, CVec& out) {
    out.resize(p);
    const std::uint64_t m = alph.size();
    for (int i = p - 1; i >= 0; --i) {
        out[i] = alph.points[static_cast<int>(t % m)];
        t /= m;
    }
}

void check_inputs(const SchemeConfig& cfg, const CVec& y, const ChannelRealization& chan) {
    cfg.validate();
    if (chan.p != cfg.p || chan.n_t != cfg.n_t || chan.n_r != cfg.n_r) {
        throw std::invalid_argument("ml_detect: channel realization does not match the config");
    }
    if (y.size() != static_cast<std::size_t>(cfg.p) * cfg.n_r) {
        throw std::invalid_argument("ml_detect: received vector length != p*n_r");
    }
}

// Per-use receiver projections: for every channel use i and transmit antenna
// j, vij = H_i[:,j]^H y_i and gn = ||H_i[:,j]||^2.
void per_use_projections(const ChannelRealization& chan, const CVec& y, std::vector<Cplx>& vij,
                         std::vector<double>& gn) {
    vij.assign(static_cast<std::size_t>(chan.p) * chan.n_t, Cplx{});
    gn.assign(vij.size(), 0.0);
    for (int i = 0; i < chan.p; ++i) {
        for (int j = 0; j < chan.n_t; ++j) {
            Cplx v{};
            double g = 0.0;
            for (int r = 0; r < chan.n_r; ++r) {
                const Cplx h = chan.blocks[i](r, j);
                v += cmul_conj(h, y[static_cast<std::size_t>(i) * chan.n_r + r]);
                g += abs_sq(h);
            }
            vij[static_cast<std::size_t>(i) * chan.n_t + j] = v;
            gn[static_cast<std::size_t>(i) * chan.n_t + j] = g;
        }
    }
}

// gram = A^H A, w = A^H y and m0/z0 for x0 = all points[0], then walk.
struct GramProblem {
    std::vector<Cplx> gram;  // p x p
    std::vector<Cplx> w;     // p
    std::vector<Cplx> z0;    // p
    double m0 = 0.0;

    void finalize(int p, Cplx s0, double y2) {
        z0.assign(p, Cplx{});
        double quad = 0.0, cross = 0.0;
        for (int a = 0; a < p; ++a) {
            Cplx acc{};
            for (int b = 0; b < p; ++b) acc += cmul(gram[a * p + b], s0);
            z0[a] = w[a] - acc;
            quad += cmul_conj(s0, acc).real();
            cross += cmul_conj(s0, w[a]).real();
        }
        m0 = y2 - 2.0 * cross + quad;
    }
};

DetectionResult detect_prpp(const SchemeConfig& cfg, const CVec& y, const ChannelRealization& chan,
                            const SchemeMaterials& mats) {
    if (!mats.prpp) throw std::invalid_argument("ml_detect: PRPP needs a phase precoder");
    const Alphabet alph = make_alphabet(cfg.alphabet);
    const int p = cfg.p;
    const CMat g = prpp_effective_channel(chan, *mats.prpp);
    const int rows = g.rows();

    GramProblem gp;
    gp.gram.assign(static_cast<std::size_t>(p) * p, Cplx{});
    gp.w.assign(p, Cplx{});
    for (int a = 0; a < p; ++a) {
        for (int b = a; b < p; ++b) {
            Cplx acc{};
            for (int r = 0; r < rows; ++r) acc += cmul_conj(g(r, a), g(r, b));
            gp.gram[a * p + b] = acc;
            gp.gram[b * p + a] = std::conj(acc);
        }
        Cplx acc{};
        for (int r = 0; r < rows; ++r) acc += cmul_conj(g(r, a), y[r]);
        gp.w[a] = acc;
    }
    const double y2 = norm_sq(y);
    gp.finalize(p, alph.points[0], y2);

    Scratch scratch;
    std::uint64_t evals = 0;
    const WalkBest best = walk_symbols(p, alph, gp.gram.data(), gp.z0.data(), gp.m0, gp.w.data(), y2, scratch, evals);

    DetectionResult res;
    symbols_of_rank(best.index, p, alph, res.hypothesis.symbols);
    res.metric = std::max(best.metric, 0.0);
    res.candidates_evaluated = evals;
    return res;
}

DetectionResult detect_sm(const SchemeConfig& cfg, const CVec& y, const ChannelRealization& chan) {
    const Alphabet alph = make_alphabet(cfg.alphabet);
    const CMat& h = chan.blocks[0];
    const int n_r = cfg.n_r;

    DetectionResult res;
    double best = std::numeric_limits<double>::infinity();
    int best_j = 1, best_l = 0;
    for (int j = 1; j <= cfg.n_t; ++j) {
        for (int l = 0; l < alph.size(); ++l) {
            double metric = 0.0;
            for (int r = 0; r < n_r; ++r) metric += abs_sq(y[r] - cmul(h(r, j - 1), alph.points[l]));
            ++res.candidates_evaluated;
            if (metric < best) {
                best = metric;
                best_j = j;
                best_l = l;
            }
        }
    }
    res.hypothesis.symbols = {alph.points[best_l]};
    res.hypothesis.antenna_pattern = ActivationPattern{1, cfg.n_t, {best_j}};
    res.metric = std::max(best, 0.0);
    return res;
}

DetectionResult detect_prpp_sm(const SchemeConfig& cfg, const CVec& y, const ChannelRealization& chan,
                               const SchemeMaterials& mats) {
    if (!mats.prpp) throw std::invalid_argument("ml_detect: PRPP-SM needs a phase precoder");
    const Alphabet alph = make_alphabet(cfg.alphabet);
    const int p = cfg.p;
    const int n_t = cfg.n_t;
    const CMat& pm = mats.prpp->matrix;
    const double y2 = norm_sq(y);

    std::vector<Cplx> vij;
    std::vector<double> gn;
    per_use_projections(chan, y, vij, gn);

    const std::uint64_t patterns = pow_u64(static_cast<std::uint64_t>(n_t), p);
    std::vector<int> ji(p);           // active antenna per use, 0-based
    std::vector<Cplx> pa(static_cast<std::size_t>(p) * p);  // P*A, row-major

    GramProblem gp;
    Scratch scratch;
    DetectionResult res;
    double best = std::numeric_limits<double>::infinity();
    std::uint64_t best_a = 0, best_t = 0;

    for (std::uint64_t a = 0; a < patterns; ++a) {
        std::uint64_t rem = a;
        for (int i = p - 1; i >= 0; --i) {
            ji[i] = static_cast<int>(rem % n_t);
            rem /= n_t;
        }
        // (P*A)[i][c] selects column c*n_t + j_c of P
        for (int i = 0; i < p; ++i)
            for (int c = 0; c < p; ++c) pa[static_cast<std::size_t>(i) * p + c] = pm(i, c * n_t + ji[c]);

        // M = D*A*P*A has block rows H_i[:,j_i] * (P*A)[i,:]; its Gram and
        // matched filter reduce to per-use scalars.
        gp.gram.assign(static_cast<std::size_t>(p) * p, Cplx{});
        gp.w.assign(p, Cplx{});
        for (int i = 0; i < p; ++i) {
            const double gni = gn[static_cast<std::size_t>(i) * n_t + ji[i]];
            const Cplx vi = vij[static_cast<std::size_t>(i) * n_t + ji[i]];
            const Cplx* row = &pa[static_cast<std::size_t>(i) * p];
            for (int c = 0; c < p; ++c) {
                const Cplx pc = std::conj(row[c]);
                gp.w[c] += cmul(pc, vi);
                for (int d = 0; d < p; ++d) gp.gram[c * p + d] += gni * cmul(pc, row[d]);
            }
        }
        gp.finalize(p, alph.points[0], y2);

        const WalkBest wb = walk_symbols(p, alph, gp.gram.data(), gp.z0.data(), gp.m0, gp.w.data(), y2, scratch,
                                         res.candidates_evaluated);
        if (wb.metric < best) {
            best = wb.metric;
            best_a = a;
            best_t = wb.index;
        }
    }

    symbols_of_rank(best_t, p, alph, res.hypothesis.symbols);
    ActivationPattern pat;
    pat.p = p;
    pat.fan = n_t;
    pat.indices.resize(p);
    std::uint64_t rem = best_a;
    for (int i = p - 1; i >= 0; --i) {
        pat.indices[i] = static_cast<int>(rem % n_t) + 1;
        rem /= n_t;
    }
    res.hypothesis.antenna_pattern = std::move(pat);
    res.metric = std::max(best, 0.0);
    return res;
}

DetectionResult detect_pim(const SchemeConfig& cfg, const CVec& y, const ChannelRealization& chan,
                           const SchemeMaterials& mats) {
    if (!mats.set) throw std::invalid_argument("ml_detect: PIM needs a precoder set");
    const Alphabet alph = make_alphabet(cfg.alphabet);
    const int p = cfg.p;
    const int n_p = cfg.n_p;
    const int cols = p * n_p;
    const CMat& q = mats.set->q.matrix;
    const double y2 = norm_sq(y);

    // D*Q has block rows h_i * Q[i,:]; Omega = (DQ)^H(DQ) and wf = (DQ)^H y
    // cover every precoder member, whose Gram is a column gather of Omega.
    std::vector<Cplx> vij;
    std::vector<double> gn;
    per_use_projections(chan, y, vij, gn);

    std::vector<Cplx> omega(static_cast<std::size_t>(cols) * cols);
    std::vector<Cplx> wf(cols);
    for (int a = 0; a < cols; ++a) {
        Cplx wacc{};
        for (int i = 0; i < p; ++i) wacc += cmul(std::conj(q(i, a)), vij[i]);
        wf[a] = wacc;
        for (int b = a; b < cols; ++b) {
            Cplx acc{};
            for (int i = 0; i < p; ++i) acc += gn[i] * cmul_conj(q(i, a), q(i, b));
            omega[static_cast<std::size_t>(a) * cols + b] = acc;
            omega[static_cast<std::size_t>(b) * cols + a] = std::conj(acc);
        }
    }

    const std::uint64_t members = mats.set->member_count();
    std::vector<int> sel(p);
    GramProblem gp;
    gp.gram.resize(static_cast<std::size_t>(p) * p);
    gp.w.resize(p);
    Scratch scratch;
    DetectionResult res;
    double best = std::numeric_limits<double>::infinity();
    std::uint64_t best_j = 0, best_t = 0;

    for (std::uint64_t j = 0; j < members; ++j) {
        std::uint64_t rem = j;
        for (int i = p - 1; i >= 0; --i) {
            sel[i] = i * n_p + static_cast<int>(rem % n_p);
            rem /= n_p;
        }
        for (int c = 0; c < p; ++c) {
            gp.w[c] = wf[sel[c]];
            for (int d = 0; d < p; ++d) gp.gram[c * p + d] = omega[static_cast<std::size_t>(sel[c]) * cols + sel[d]];
        }
        gp.finalize(p, alph.points[0], y2);

        const WalkBest wb = walk_symbols(p, alph, gp.gram.data(), gp.z0.data(), gp.m0, gp.w.data(), y2, scratch,
                                         res.candidates_evaluated);
        if (wb.metric < best) {
            best = wb.metric;
            best_j = j;
            best_t = wb.index;
        }
    }

    symbols_of_rank(best_t, p, alph, res.hypothesis.symbols);
    res.hypothesis.precoder_index = best_j;
    res.metric = std::max(best, 0.0);
    return res;
}

DetectionResult detect_pim_sm(const SchemeConfig& cfg, const CVec& y, const ChannelRealization& chan,
                              const SchemeMaterials& mats) {
    if (!mats.prpp || !mats.set) throw std::invalid_argument("ml_detect: PIM-SM needs P and Q");
    const Alphabet alph = make_alphabet(cfg.alphabet);
    const int p = cfg.p;
    const int n_t = cfg.n_t;
    const int n_p = cfg.n_p;
    const int qcols = p * n_p;
    const CMat& pm = mats.prpp->matrix;
    const CMat& q = mats.set->q.matrix;
    const double y2 = norm_sq(y);

    std::vector<Cplx> vij;
    std::vector<double> gn;
    per_use_projections(chan, y, vij, gn);

    // Per antenna pattern A: with M = D*A*P*A, cache Y = Q^H (M^H M) Q and
    // wq = Q^H M^H y. The Gram and matched filter of G = M*P_j are then
    // column gathers of Y and wq for every precoder member j.
    const std::uint64_t patterns = pow_u64(static_cast<std::uint64_t>(n_t), p);
    const std::size_t ysz = static_cast<std::size_t>(qcols) * qcols;
    std::vector<Cplx> ycache(patterns * ysz);
    std::vector<Cplx> wqcache(patterns * qcols);

    {
        std::vector<int> ji(p);
        std::vector<Cplx> pa(static_cast<std::size_t>(p) * p);
        std::vector<Cplx> gm(static_cast<std::size_t>(p) * p);
        std::vector<Cplx> wa(p);
        std::vector<Cplx> tq(static_cast<std::size_t>(p) * qcols);
        for (std::uint64_t a = 0; a < patterns; ++a) {
            std::uint64_t rem = a;
            for (int i = p - 1; i >= 0; --i) {
                ji[i] = static_cast<int>(rem % n_t);
                rem /= n_t;
            }
            for (int i = 0; i < p; ++i)
                for (int c = 0; c < p; ++c) pa[static_cast<std::size_t>(i) * p + c] = pm(i, c * n_t + ji[c]);

            std::fill(gm.begin(), gm.end(), Cplx{});
            std::fill(wa.begin(), wa.end(), Cplx{});
            for (int i = 0; i < p; ++i) {
                const double gni = gn[static_cast<std::size_t>(i) * n_t + ji[i]];
                const Cplx vi = vij[static_cast<std::size_t>(i) * n_t + ji[i]];
                const Cplx* row = &pa[static_cast<std::size_t>(i) * p];
                for (int c = 0; c < p; ++c) {
                    const Cplx pc = std::conj(row[c]);
                    wa[c] += cmul(pc, vi);
                    for (int d = 0; d < p; ++d) gm[c * p + d] += gni * cmul(pc, row[d]);
                }
            }
            // tq = gm * Q ; Y = Q^H tq ; wq = Q^H wa
            for (int c = 0; c < p; ++c) {
                for (int b = 0; b < qcols; ++b) {
                    Cplx acc{};
                    for (int d = 0; d < p; ++d) acc += cmul(gm[static_cast<std::size_t>(c) * p + d], q(d, b));
                    tq[static_cast<std::size_t>(c) * qcols + b] = acc;
                }
            }
            Cplx* ya = &ycache[a * ysz];
            for (int r = 0; r < qcols; ++r) {
                for (int b = 0; b < qcols; ++b) {
                    Cplx acc{};
                    for (int d = 0; d < p; ++d) acc += cmul(std::conj(q(d, r)), tq[static_cast<std::size_t>(d) * qcols + b]);
                    ya[static_cast<std::size_t>(r) * qcols + b] = acc;
                }
            }
            Cplx* wq = &wqcache[a * static_cast<std::size_t>(qcols)];
            for (int r = 0; r < qcols; ++r) {
                Cplx acc{};
                for (int d = 0; d < p; ++d) acc += cmul(std::conj(q(d, r)), wa[d]);
                wq[r] = acc;
            }
        }
    }

    const std::uint64_t members = mats.set->member_count();
    std::vector<int> sel(p);
    GramProblem gp;
    gp.gram.resize(static_cast<std::size_t>(p) * p);
    gp.w.resize(p);
    Scratch scratch;
    DetectionResult res;
    double best = std::numeric_limits<double>::infinity();
    std::uint64_t best_j = 0, best_a = 0, best_t = 0;

    for (std::uint64_t j = 0; j < members; ++j) {
        std::uint64_t rem = j;
        for (int i = p - 1; i >= 0; --i) {
            sel[i] = i * n_p + static_cast<int>(rem % n_p);
            rem /= n_p;
        }
        for (std::uint64_t a = 0; a < patterns; ++a) {
            const Cplx* ya = &ycache[a * ysz];
            const Cplx* wq = &wqcache[a * static_cast<std::size_t>(qcols)];
            for (int c = 0; c < p; ++c) {
                gp.w[c] = wq[sel[c]];
                for (int d = 0; d < p; ++d) gp.gram[c * p + d] = ya[static_cast<std::size_t>(sel[c]) * qcols + sel[d]];
            }
            gp.finalize(p, alph.points[0], y2);

            const WalkBest wb = walk_symbols(p, alph, gp.gram.data(), gp.z0.data(), gp.m0, gp.w.data(), y2, scratch,
                                             res.candidates_evaluated);
            if (wb.metric < best) {
                best = wb.metric;
                best_j = j;
                best_a = a;
                best_t = wb.index;
            }
        }
    }

    symbols_of_rank(best_t, p, alph, res.hypothesis.symbols);
    ActivationPattern pat;
    pat.p = p;
    pat.fan = n_t;
    pat.indices.resize(p);
    std::uint64_t rem = best_a;
    for (int i = p - 1; i >= 0; --i) {
        pat.indices[i] = static_cast<int>(rem % n_t) + 1;
        rem /= n_t;
    }
    res.hypothesis.antenna_pattern = std::move(pat);
    res.hypothesis.precoder_index = best_j;
    res.metric = std::max(best, 0.0);
    return res;
}

}  // namespace

CMat prpp_effective_channel(const ChannelRealization& chan, const PhasePrecoder& prpp) {
    if (chan.n_t != 1) throw std::invalid_argument("prpp_effective_channel: n_t must be 1");
    if (prpp.rows != chan.p) throw std::invalid_argument("prpp_effective_channel: precoder rows != p");
    CMat g(chan.p * chan.n_r, prpp.cols);
    for (int i = 0; i < chan.p; ++i)
        for (int r = 0; r < chan.n_r; ++r)
            for (int c = 0; c < prpp.cols; ++c) g(i * chan.n_r + r, c) = cmul(chan.blocks[i](r, 0), prpp.matrix(i, c));
    return g;
}

DetectionResult ml_detect(const SchemeConfig& cfg, const CVec& y, const ChannelRealization& chan,
                          const SchemeMaterials& mats, std::uint64_t budget) {
    check_inputs(cfg, y, chan);
    const std::uint64_t space = hypothesis_space_size(cfg);
    if (space > budget) {
        throw HypothesisBudgetExceeded("ml_detect: joint hypothesis space " + std::to_string(space) +
                                       " exceeds the budget of " + std::to_string(budget) +
                                       "; use LAS detection for large PRPP blocks");
    }
    switch (cfg.scheme) {
        case Scheme::Prpp: return detect_prpp(cfg, y, chan, mats);
        case Scheme::Sm: return detect_sm(cfg, y, chan);
        case Scheme::PrppSm: return detect_prpp_sm(cfg, y, chan, mats);
        case Scheme::Pim: return detect_pim(cfg, y, chan, mats);
        case Scheme::PimSm: return detect_pim_sm(cfg, y, chan, mats);
    }
    throw std::invalid_argument("unknown scheme");
}

DetectionResult ml_detect_pim_activation(const SchemeConfig& cfg, const CVec& y, const ChannelRealization& chan,
                                         const SchemeMaterials& mats, std::uint64_t budget) {
    check_inputs(cfg, y, chan);
    if (cfg.scheme != Scheme::Pim) throw std::invalid_argument("activation-form detection applies to PIM only");
    if (!mats.set) throw std::invalid_argument("ml_detect: PIM needs a precoder set");
    const std::uint64_t space = hypothesis_space_size(cfg);
    if (space > budget) {
        throw HypothesisBudgetExceeded("ml_detect: joint hypothesis space exceeds the budget");
    }

    const Alphabet alph = make_alphabet(cfg.alphabet);
    const int p = cfg.p;
    const CMat dq = matmul(dense_block_diagonal(chan), mats.set->q.matrix);
    const std::uint64_t members = mats.set->member_count();
    const std::uint64_t symbols = pow_u64(static_cast<std::uint64_t>(alph.size()), p);

    DetectionResult res;
    double best = std::numeric_limits<double>::infinity();
    std::uint64_t best_b = 0, best_t = 0;
    CVec x(p);
    for (std::uint64_t b = 0; b < members; ++b) {
        const CMat bm = expand_activation(pattern_of_precoder_index(p, cfg.n_p, b));
        const CMat gb = matmul(dq, bm);
        for (std::uint64_t t = 0; t < symbols; ++t) {
            symbols_of_rank(t, p, alph, x);
            const double metric = sub_norm_sq(y, matvec(gb, x));
            ++res.candidates_evaluated;
            if (metric < best) {
                best = metric;
                best_b = b;
                best_t = t;
            }
        }
    }
    symbols_of_rank(best_t, p, alph, res.hypothesis.symbols);
    res.hypothesis.precoder_index = best_b;
    res.metric = std::max(best, 0.0);
    return res;
}

CVec mmse_estimate(const CMat& g_eff, const CVec& y, double sigma2) {
    if (g_eff.rows() < g_eff.cols()) throw std::invalid_argument("mmse_estimate: G must have rows >= cols");
    if (y.size() != static_cast<std::size_t>(g_eff.rows())) throw std::invalid_argument("mmse_estimate: length mismatch");
    const CMat gh = hermitian(g_eff);
    CMat a = matmul(gh, g_eff);
    for (int i = 0; i < a.rows(); ++i) a(i, i) += sigma2;
    return solve_linear(a, matvec(gh, y));
}

DetectionResult las_detect(const CMat& g_eff, const CVec& y, const Alphabet& alphabet, const CVec& init,
                           const std::function<void(const LasFlip&)>& on_flip) {
    if (alphabet.name != Mod::Bpsk && alphabet.name != Mod::Qam4) {
        throw std::invalid_argument("las_detect: alphabet must be BPSK or 4-QAM");
    }
    const int p = g_eff.cols();
    const int rows = g_eff.rows();
    if (y.size() != static_cast<std::size_t>(rows)) throw std::invalid_argument("las_detect: length mismatch");
    if (init.size() != static_cast<std::size_t>(p)) throw std::invalid_argument("las_detect: init length mismatch");
    for (const Cplx& s : init) {
        if (std::abs(s - alphabet.points[nearest_point(alphabet, s)]) > 1e-9) {
            throw std::invalid_argument("las_detect: init must be quantized to the alphabet");
        }
    }

    const int m = alphabet.size();
    CVec s = init;
    std::vector<Cplx> gram(static_cast<std::size_t>(p) * p);
    for (int a = 0; a < p; ++a) {
        for (int b = a; b < p; ++b) {
            Cplx acc{};
            for (int r = 0; r < rows; ++r) acc += cmul_conj(g_eff(r, a), g_eff(r, b));
            gram[static_cast<std::size_t>(a) * p + b] = acc;
            gram[static_cast<std::size_t>(b) * p + a] = std::conj(acc);
        }
    }
    CVec r(rows);
    for (int i = 0; i < rows; ++i) {
        Cplx acc = y[i];
        for (int c = 0; c < p; ++c) acc -= cmul(g_eff(i, c), s[c]);
        r[i] = acc;
    }
    std::vector<Cplx> z(p);
    auto resync_z = [&] {
        for (int i = 0; i < rows; ++i) {
            Cplx acc = y[i];
            for (int c = 0; c < p; ++c) acc -= cmul(g_eff(i, c), s[c]);
            r[i] = acc;
        }
        for (int c = 0; c < p; ++c) {
            Cplx acc{};
            for (int i = 0; i < rows; ++i) acc += cmul_conj(g_eff(i, c), r[i]);
            z[c] = acc;
        }
    };
    resync_z();

    DetectionResult res;
    const std::uint64_t flip_cap = 1ull << 20;  // descent is strict; this is a drift backstop
    while (res.flips < flip_cap) {
        double best_dm = 0.0;
        int best_c = -1, best_idx = -1;
        for (int c = 0; c < p; ++c) {
            for (int idx = 0; idx < m; ++idx) {
                const Cplx pt = alphabet.points[idx];
                if (pt == s[c]) continue;
                const Cplx delta = pt - s[c];
                const double dm = -2.0 * (delta.real() * z[c].real() + delta.imag() * z[c].imag()) +
                                  abs_sq(delta) * gram[static_cast<std::size_t>(c) * p + c].real();
                ++res.candidates_evaluated;
                if (dm < best_dm) {
                    best_dm = dm;
                    best_c = c;
                    best_idx = idx;
                }
            }
        }
        if (best_c < 0) break;  // local minimum: no strictly improving flip

        const Cplx to = alphabet.points[best_idx];
        if (on_flip) on_flip({best_c, s[best_c], to, best_dm});
        const Cplx delta = to - s[best_c];
        s[best_c] = to;
        for (int d = 0; d < p; ++d) z[d] -= cmul(gram[static_cast<std::size_t>(d) * p + best_c], delta);
        ++res.flips;
        if ((res.flips & 0x7F) == 0) resync_z();
    }

    double metric = 0.0;
    for (int i = 0; i < rows; ++i) {
        Cplx acc = y[i];
        for (int c = 0; c < p; ++c) acc -= cmul(g_eff(i, c), s[c]);
        metric += abs_sq(acc);
    }
    res.hypothesis.symbols = std::move(s);
    res.metric = metric;
    return res;
}

Bits decode_result(const SchemeConfig& cfg, const DetectionResult& result) {
    return decode_bits(cfg, result.hypothesis);
}

}  // namespace pimsim
