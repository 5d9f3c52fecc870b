#include "bbbc/analysis.hpp"

#include <cmath>
#include <stdexcept>

#include "bbbc/numerics.hpp"

namespace bbbc {

double mfb_snr(const ChannelRealization& ch, double p_t, double sigma2,
               double delta_gamma) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("mfb_snr: sigma2 must be > 0");
  return p_t * delta_gamma * ch.cascaded_energy() / sigma2;
}

namespace {

void check_params(const GKParams& p) {
  if (!(p.k > 0.0) || !(p.m > 0.0) || !(p.omega > 0.0))
    throw std::invalid_argument("generalized-K: k, m, omega must be > 0");
}

}  // namespace

double gk_pdf(double x, const GKParams& params) {
  check_params(params);
  if (!(x > 0.0)) throw std::invalid_argument("gk_pdf: x must be > 0");
  const double k = params.k, m = params.m;
  const double ratio = k * m / params.omega;
  const double arg = 2.0 * std::sqrt(ratio * x);
  // assembled in log space; the Bessel factor can underflow far in the tail
  const double bessel = bessel_k(k - m, arg);
  if (bessel == 0.0) return 0.0;
  const double log_pdf = std::log(2.0) - std::lgamma(k) - std::lgamma(m) +
                         0.5 * (k + m) * std::log(ratio) +
                         (0.5 * (k + m) - 1.0) * std::log(x) + std::log(bessel);
  return std::exp(log_pdf);
}

double gk_cdf(double x, const GKParams& params) {
  check_params(params);
  if (x < 0.0) throw std::invalid_argument("gk_cdf: x must be >= 0");
  if (x == 0.0) return 0.0;
  const double root = std::sqrt(x);
  const auto integrand = [&params](double t) {
    return t > 0.0 ? 2.0 * t * gk_pdf(t * t, params) : 0.0;
  };
  const double value = integrate_adaptive(integrand, 0.0, root, 1e-10, 1e-300);
  return std::min(1.0, value);
}

GKParams gk_sum_params(int antennas, int taps, double beta_product) {
  if (antennas < 1) throw std::invalid_argument("gk_sum_params: M must be >= 1");
  if (taps < 1) throw std::invalid_argument("gk_sum_params: L_g must be >= 1");
  const double k1 = static_cast<double>(taps);
  const double m1 = 1.0;
  const double eps = (antennas - 1) * (-0.127 - 0.95 * k1 - 0.0058 * m1) /
                     (1.0 + 0.00124 * k1 + 0.98 * m1);
  GKParams p{static_cast<double>(antennas) * k1 + eps,
             static_cast<double>(antennas),
             static_cast<double>(antennas) * beta_product};
  if (!(p.k > 0.0))
    throw std::domain_error("gk_sum_params: moment matching gives k <= 0 for this (M, L_g)");
  return p;
}

double outage_general(const OutageQuery& q, const GKParams& params) {
  if (!(q.p_t > 0.0)) throw std::invalid_argument("outage_general: p_t must be > 0");
  return gk_cdf(q.a1() / q.p_t, params);
}

double outage_special(const OutageQuery& q, int antennas, int taps,
                      double beta1, double beta2) {
  if (!(q.p_t > 0.0)) throw std::invalid_argument("outage_special: p_t must be > 0");
  const double a3 = 2.0 * q.a1() * static_cast<double>(taps) / (beta1 * beta2);
  return regularized_lower_gamma(static_cast<double>(antennas) * taps,
                                 a3 / (2.0 * q.p_t));
}

double theoretical_ber(double gamma) {
  if (gamma < 0.0) throw std::invalid_argument("theoretical_ber: gamma must be >= 0");
  return q_function(std::sqrt(gamma));
}

double diversity_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2)
    throw std::invalid_argument("diversity_slope: need at least 2 points");
  double prev = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].second > 0.0))
      throw std::invalid_argument("diversity_slope: outage must be > 0");
    if (i > 0 && !(points[i].first > prev))
      throw std::invalid_argument("diversity_slope: p_t must be strictly increasing");
    prev = points[i].first;
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(points.size());
  for (const auto& [pt, out] : points) {
    const double x = std::log10(pt);
    const double y = -std::log10(out);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace bbbc
