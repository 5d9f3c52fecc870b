// analysis.hpp - outage and BER analysis via generalized-K statistics
//
// The cascaded channel gain |f|^2 ||g||^2 of one antenna follows a
// generalized-K distribution with k = L_g, m = 1, Omega = b1 b2; the
// M-antenna sum is approximated by another generalized-K with moment-matched
// parameters k_M = M L_g + eps, m_M = M, Omega_M = M b1 b2. The CDF is
// evaluated by adaptive quadrature of the Bessel-form PDF rather than via
// Meijer's G function.

#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "bbbc/channel.hpp"

namespace bbbc {

struct GKParams {
  double k;      // shape of the gamma factor with more degrees of freedom
  double m;      // shape that controls the diversity order
  double omega;  // mean
};

// matched filter bound SNR p_t * dgamma * ||h||^2 / sigma^2
double mfb_snr(const ChannelRealization& ch, double p_t, double sigma2,
               double delta_gamma);

// f(x) = 2/(G(k)G(m)) (km/O)^((k+m)/2) x^((k+m)/2-1) K_{k-m}(2 sqrt(km x/O))
double gk_pdf(double x, const GKParams& params);

// quadrature of gk_pdf on [0, x] with an x = t^2 substitution so the
// integrable singularity near zero is lifted
double gk_cdf(double x, const GKParams& params);

// moment matching for the sum of M i.i.d. per-antenna gains; M = 1 returns
// (L_g, 1, beta_product) exactly
GKParams gk_sum_params(int antennas, int taps, double beta_product);

struct OutageQuery {
  double p_t;          // transmit power, W
  double sigma2;       // noise power, W
  double rate;         // target rate R, bps/Hz
  double delta_gamma;  // N / (N + L_g - 1)

  double gamma_th() const { return std::exp2(rate) - 1.0; }
  double a1() const { return sigma2 * gamma_th() / delta_gamma; }
};

// P_out = F(a1 / p_t); exact for M = 1, moment-matched for M > 1
double outage_general(const OutageQuery& q, const GKParams& params);

// LoS forward link: P_out = gamma(M L_g, a3 / (2 p_t)) / Gamma(M L_g) with
// a3 = 2 a1 L_g / (b1 b2)
double outage_special(const OutageQuery& q, int antennas, int taps,
                      double beta1, double beta2);

// Gray QPSK: P_err = Q(sqrt(gamma))
double theoretical_ber(double gamma);

// least-squares slope of -log10(outage) against log10(p_t)
double diversity_slope(const std::vector<std::pair<double, double>>& points);

}  // namespace bbbc
