// receiver.hpp - reader-side processing chain
//
// Pipeline: time-domain mean removal of the direct-link carrier, overlap-add
// to make the channel circulant, pilot-based LS estimation of the equivalent
// CIR and the residual interference, then frequency-domain equalization
// (ZF / MMSE / BI-GDFE).
//
// After OLA the noise is no longer white: the first L_g - 1 positions carry
// doubled variance, profile alpha_N = [2...2, 1...1] with sum N + L_g - 1.
// gamma_bar = p_t * dgamma / sigma^2 with dgamma = N / (N + L_g - 1) is the
// average post-OLA SNR used by the equalizer formulas.

#pragma once

#include <span>
#include <stdexcept>

#include "bbbc/channel.hpp"
#include "bbbc/numerics.hpp"
#include "bbbc/waveform.hpp"

namespace bbbc {

struct singular_channel_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct singular_estimation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// arithmetic mean of the averaging window; approximates sqrt(p_t) h_d
cplx estimate_direct_mean(std::span<const cplx> samples);

cvec suppress_direct(const cvec& z, cplx z_bar);

// alpha_N = [2 * 1_{Lg-1}; 1_{N-Lg+1}]
cvec ola_noise_profile(int n, int taps);

struct OlaBlock {
  cvec y;    // length N
  int taps;  // L_g used for the fold
};

// folds samples N .. N+Lg-2 of the padded block onto positions 0 .. Lg-2
OlaBlock overlap_add(const cvec& z_hat, int n, int taps);

struct ChannelEstimate {
  cvec h_eq_est;               // length N, placement of the estimated taps
  cplx delta_hd_est;           // residual direct-link estimate
  cvec per_antenna_taps;       // M * L_g LS unknowns, antenna-major
};

// LS estimator for the stacked pilot model; the pilot pair must be
// anti-symmetric (second block the negative of the first), which makes the
// normal matrix block-orthogonal between channel and interference parts.
// The pilot-dependent factorization is done once so repeated estimates are a
// pair of correlations plus triangular solves.
class LsEstimator {
 public:
  LsEstimator(const cvec& pilot, const ChannelParams& p);

  ChannelEstimate estimate(const OlaBlock& y_first, const OlaBlock& y_second,
                           double p_t) const;

 private:
  int n_, taps_, antennas_, delay_step_;
  cvec pilot_;
  cvec chol_;           // lower Cholesky factor of C~^H C~, row-major K x K
  double alpha_norm2_;  // ||alpha_N||^2
  cvec alpha_;
};

ChannelEstimate ls_estimate(const OlaBlock& y_first, const OlaBlock& y_second,
                            const cvec& pilot, const ChannelParams& p,
                            double p_t);

// y~ = W (y - sqrt(p_t) * delta_hd * alpha) / sqrt(p_t)
cvec to_frequency_domain(const cvec& y, cplx delta_hd_est, double p_t,
                         const cvec& alpha);

// per-bin channel gains lambda_n = sqrt(N) * dft(h_eq)
cvec freq_response(const cvec& h_eq);

double snr_loss(int n, int taps);                                // dgamma
double gamma_bar(double p_t, double sigma2, int n, int taps);    // p_t dgamma / sigma^2

struct EqualizerOutput {
  cvec soft_symbols;
  cvec hard_symbols;
  double predicted_snr = 0.0;  // linear
  int iterations_used = 0;     // BI-GDFE only
};

// c^ = W^H Lambda^-1 y~; throws singular_channel_error when any bin is below
// 1e-12 * max |lambda|
EqualizerOutput equalize_zf(const cvec& y_freq, const cvec& lambda,
                            double gamma_bar, const ModulationAlphabet& alphabet);

EqualizerOutput equalize_mmse(const cvec& y_freq, const cvec& lambda,
                              double gamma_bar, const ModulationAlphabet& alphabet);

// one BI-GDFE iteration: frequency-domain FFE built from the previous IDC
// coefficient rho, plus time-domain feedback of ISI regenerated from the
// previous hard decisions. alpha is the per-symbol signal gain tr(F^H L)/N.
struct GdfeStep {
  cvec soft;
  double alpha;
};
GdfeStep bi_gdfe_step(const cvec& y_freq, const cvec& lambda, double gamma_bar,
                      double rho, const cvec& previous_decisions);

// post-FFE SINR of an iteration whose filter was built from rho; rho = 0
// reduces to the MMSE output SNR, rho = 1 reaches the matched filter bound
double bi_gdfe_sinr(const cvec& lambda, double gamma_bar, double rho);

// full recursion; iteration 1 uses rho = 0 (pure MMSE), stops early when hard
// decisions repeat. rho update: rho = 1 - 2 Q(sqrt(SINR)), clipped to 0.9999.
EqualizerOutput bi_gdfe(const cvec& y_freq, const cvec& lambda,
                        double gamma_bar, int max_iters,
                        const ModulationAlphabet& alphabet);

}  // namespace bbbc
