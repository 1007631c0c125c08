// SPDX-License-Identifier: Apache-2.0

#include "pimsim/channel.hpp"

#include <cmath>

namespace pimsim {

ChannelRealization draw_channel(Rng& rng, int p, int n_t, int n_r) {
    if (p < 1 || n_t < 1 || n_r < 1) throw std::invalid_argument("draw_channel: dimensions must be >= 1");
    ChannelRealization chan;
    chan.p = p;
    chan.n_t = n_t;
    chan.n_r = n_r;
    chan.blocks.reserve(p);
    for (int i = 0; i < p; ++i) {
        CMat h(n_r, n_t);
        for (int r = 0; r < n_r; ++r)
            for (int c = 0; c < n_t; ++c) h(r, c) = rng.next_gaussian_cplx(1.0);
        chan.blocks.push_back(std::move(h));
    }
    return chan;
}

CMat dense_block_diagonal(const ChannelRealization& chan) {
    CMat d(chan.p * chan.n_r, chan.p * chan.n_t);
    for (int i = 0; i < chan.p; ++i)
        for (int r = 0; r < chan.n_r; ++r)
            for (int c = 0; c < chan.n_t; ++c) d(i * chan.n_r + r, i * chan.n_t + c) = chan.blocks[i](r, c);
    return d;
}

CVec apply_channel(const ChannelRealization& chan, const TxSignal& sig) {
    if (static_cast<int>(sig.antenna.size()) != chan.p || sig.amplitude.size() != sig.antenna.size()) {
        throw std::invalid_argument("apply_channel: signal length != p");
    }
    CVec y(static_cast<std::size_t>(chan.p) * chan.n_r);
    for (int i = 0; i < chan.p; ++i) {
        const int j = sig.antenna[i];
        if (j < 1 || j > chan.n_t) throw std::out_of_range("apply_channel: antenna index out of range");
        const Cplx amp = sig.amplitude[i];
        for (int r = 0; r < chan.n_r; ++r) y[i * chan.n_r + r] = detail::cmul(chan.blocks[i](r, j - 1), amp);
    }
    return y;
}

NoiseSpec snr_to_sigma2(double snr_db) { return {std::pow(10.0, -snr_db / 10.0)}; }

CVec add_noise(Rng& rng, const CVec& clean, const NoiseSpec& noise) {
    if (!(noise.sigma2 > 0.0)) throw std::invalid_argument("add_noise: sigma2 must be > 0");
    CVec y(clean.size());
    for (std::size_t i = 0; i < clean.size(); ++i) y[i] = clean[i] + rng.next_gaussian_cplx(noise.sigma2);
    return y;
}

}  // namespace pimsim
