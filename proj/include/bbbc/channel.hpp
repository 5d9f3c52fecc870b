// channel.hpp - stochastic link model and received-signal synthesis
//
// Cascaded (pinhole) channel: each antenna sees a flat forward gain f_m and a
// frequency-selective backward CIR g_m, so h_m(l) = f_m g_m(l). The
// equivalent CIR places each antenna's taps at offset (m-1)D, which is what
// cyclic delay diversity turns into frequency selectivity at the reader.

#pragma once

#include "bbbc/numerics.hpp"
#include "bbbc/rng.hpp"
#include "bbbc/waveform.hpp"

namespace bbbc {

// beta = 1e-3 * d^-v
double pathloss(double distance_m, double exponent);

enum class ChannelRegime { GeneralRayleigh, LosForward };

struct ChannelParams {
  int antennas = 16;   // M
  int taps = 4;        // L_g
  int block_size = 128;  // N
  int delay_step = 8;  // D
  int zp_len = 16;     // N_zp
  double beta_forward = 1e-5;   // beta_1
  double beta_backward = 1e-7;  // beta_2
  double beta_direct = 1e-9;    // beta_d
  ChannelRegime regime = ChannelRegime::GeneralRayleigh;
  double los_spacing_ratio = 0.5;  // r, antenna spacing / wavelength
  double los_aoa = 0.0;            // theta, radians

  // L_g <= D <= floor(N/M), N >= M L_g, N_zp > L_g
  void validate() const;
};

struct ChannelRealization {
  cplx direct_gain;             // h_d
  cvec forward;                 // f, size M
  std::vector<cvec> backward;   // g[m], size M x L_g
  std::vector<cvec> cascaded;   // h[m][l] = f[m] * g[m][l]
  cvec h_eq;                    // length N

  // ||h||^2 = sum_m |f_m|^2 ||g_m||^2
  double cascaded_energy() const;
};

// GeneralRayleigh: f_m ~ CN(0, b1), g_m(l) ~ CN(0, b2/L_g), h_d ~ CN(0, b_d).
// LosForward: f_m = sqrt(b1) exp(-j 2 pi (m-1) r sin theta), g and h_d as above.
ChannelRealization sample_channels(const ChannelParams& p, RngStream& rng);

// ||h||^2 of the realization the same stream state would have produced;
// consumes the stream identically to sample_channels but skips the vectors
double sample_cascaded_gain(const ChannelParams& p, RngStream& rng);

// h_eq = [h_1; 0_{D-Lg}; ...; h_M; 0_{N-(M-1)D-Lg}]
cvec equivalent_cir(const std::vector<cvec>& cascaded, int delay_step,
                    int block_size);

// per block: lower-Toeplitz (linear, truncated) convolution of every
// antenna's zero-padded, cyclically shifted copy with h_m, summed over
// antennas, plus the constant direct term and per-sample AWGN; blocks are
// concatenated in frame order
cvec propagate(const Frame& frame, const ChannelRealization& ch,
               const ChannelParams& p, double p_t, double sigma2,
               RngStream& rng);

}  // namespace bbbc
