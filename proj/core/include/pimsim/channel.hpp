// SPDX-License-Identifier: Apache-2.0
//
// i.i.d. Rayleigh flat-fading block channel with AWGN. SNR convention:
// transmit energy per channel use is one (unit-energy alphabets, unit-norm
// precoder rows) and fading has unit variance, so the average received SNR
// per receive antenna is 1/sigma^2.

#pragma once

#include "pimsim/numerics.hpp"
#include "pimsim/schemes.hpp"

namespace pimsim {

/// p per-channel-use fading matrices H_(i), each n_r x n_t. Aggregated they
/// form the block-diagonal D of size (p*n_r) x (p*n_t).
struct ChannelRealization {
    int p = 0;
    int n_t = 1;
    int n_r = 1;
    std::vector<CMat> blocks;
};

/// Entries drawn i.i.d. CN(0,1), block by block in row-major order.
ChannelRealization draw_channel(Rng& rng, int p, int n_t, int n_r);

/// Materialize the block-diagonal D (test oracles, MMSE assembly).
CMat dense_block_diagonal(const ChannelRealization& chan);

/// Receive p*n_r samples: segment i is H_(i) applied to the one-hot spatial
/// vector carrying amplitude_i on antenna_i.
CVec apply_channel(const ChannelRealization& chan, const TxSignal& sig);

struct NoiseSpec {
    double sigma2 = 1.0;  // total variance per complex sample
};

NoiseSpec snr_to_sigma2(double snr_db);

CVec add_noise(Rng& rng, const CVec& clean, const NoiseSpec& noise);

}  // namespace pimsim
