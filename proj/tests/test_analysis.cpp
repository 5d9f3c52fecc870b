#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bbbc/analysis.hpp"
#include "bbbc/numerics.hpp"

using namespace bbbc;

namespace {

// quadrature of x^power * pdf over [0, hi] with the t^2 substitution, kept
// separate from the gk_cdf implementation path
double gk_moment(const GKParams& p, double power, double hi) {
  return integrate_adaptive(
      [&p, power](double t) {
        if (t <= 0.0) return 0.0;
        const double x = t * t;
        return 2.0 * t * std::pow(x, power) * gk_pdf(x, p);
      },
      0.0, std::sqrt(hi), 1e-9, 1e-14);
}

ChannelRealization make_realization(const cvec& f, const std::vector<cvec>& g,
                                    int delay_step, int n) {
  ChannelRealization ch;
  ch.direct_gain = 0.0;
  ch.forward = f;
  ch.backward = g;
  ch.cascaded.resize(g.size());
  for (std::size_t m = 0; m < g.size(); ++m) {
    ch.cascaded[m].resize(g[m].size());
    for (std::size_t l = 0; l < g[m].size(); ++l) ch.cascaded[m][l] = f[m] * g[m][l];
  }
  ch.h_eq = equivalent_cir(ch.cascaded, delay_step, n);
  return ch;
}

}  // namespace

TEST_CASE("mfb_snr basics and equivalent-CIR cross-check") {
  const ChannelRealization zero =
      make_realization({cplx(0, 0)}, {{cplx(0, 0), cplx(0, 0)}}, 4, 8);
  CHECK(mfb_snr(zero, 10.0, 1.0, 1.0) == 0.0);

  const ChannelRealization unit = make_realization({cplx(1, 0)}, {{cplx(1, 0)}}, 4, 8);
  CHECK(mfb_snr(unit, 10.0, 1.0, 1.0) == doctest::Approx(10.0).epsilon(1e-14));

  RngStream rng(1);
  ChannelParams p;
  p.antennas = 2;
  p.taps = 2;
  p.block_size = 16;
  p.delay_step = 4;
  p.zp_len = 4;
  for (int i = 0; i < 20; ++i) {
    const ChannelRealization ch = sample_channels(p, rng);
    double h_eq_energy = 0.0;
    for (const auto& v : ch.h_eq) h_eq_energy += std::norm(v);
    CHECK(mfb_snr(ch, 3.0, 2.0, 0.9) ==
          doctest::Approx(3.0 * 0.9 * h_eq_energy / 2.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(mfb_snr(unit, 1.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("gk_pdf reproduces the single-antenna product density") {
  // product form: (2/G(Lg)) (Lg/b)^{(Lg+1)/2} z^{(Lg-1)/2} K_{Lg-1}(2 sqrt(Lg z / b))
  const int taps = 4;
  const double beta = 0.7;
  const GKParams p{static_cast<double>(taps), 1.0, beta};
  for (double z : {0.05, 0.3, 1.0, 2.5}) {
    const double direct = 2.0 / std::tgamma(taps) *
                          std::pow(taps / beta, 0.5 * (taps + 1)) *
                          std::pow(z, 0.5 * (taps - 1)) *
                          bessel_k(taps - 1, 2.0 * std::sqrt(taps * z / beta));
    CHECK(gk_pdf(z, p) == doctest::Approx(direct).epsilon(1e-10));
  }
  CHECK_THROWS_AS(gk_pdf(0.0, p), std::invalid_argument);
  CHECK_THROWS_AS(gk_pdf(1.0, GKParams{0.0, 1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("gk_pdf integrates to one with mean omega and the stated variance") {
  const GKParams sets[] = {{4.0, 1.0, 1.0},
                           {10.056101886184106, 4.0, 4.0},
                           {1.0, 1.0, 0.5},
                           {2.36, 4.0, 16.0}};
  for (const auto& p : sets) {
    // the exp(-2 sqrt(km x / O)) tail forces a wide window for the moments
    const double hi = p.omega * (40.0 + 400.0 / (p.k * p.m));
    const double mass = gk_moment(p, 0.0, hi);
    const double mean = gk_moment(p, 1.0, hi);
    const double second = gk_moment(p, 2.0, hi);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(mean == doctest::Approx(p.omega).epsilon(1e-5));
    const double var_expected =
        p.omega * p.omega * (p.k + p.m + 1.0) / (p.k * p.m);
    CHECK(second - mean * mean == doctest::Approx(var_expected).epsilon(2e-5));
  }
}

TEST_CASE("gk_cdf closed forms") {
  const GKParams exp_pair{1.0, 1.0, 2.0};
  CHECK(gk_cdf(0.0, exp_pair) == 0.0);
  // k = m = 1: F(x) = 1 - 2 sqrt(x/O) K_1(2 sqrt(x/O)); at x = O this is
  // 1 - 2 K_1(2) = 0.7202682...
  CHECK(gk_cdf(exp_pair.omega, exp_pair) ==
        doctest::Approx(0.7202682153680).epsilon(1e-7));
  for (double x : {0.1, 0.7, 3.0, 9.0}) {
    const double closed = 1.0 - 2.0 * std::sqrt(x / 2.0) * bessel_k(1.0, 2.0 * std::sqrt(x / 2.0));
    CHECK(gk_cdf(x, exp_pair) == doctest::Approx(closed).epsilon(1e-8));
  }

  // m = 1, integer k: F(x) = 1 - (2/G(k)) (a x)^{k/2} K_k(2 sqrt(a x)), a = k/O
  const GKParams prod{4.0, 1.0, 1.0};
  for (double x : {0.05, 0.4, 1.0, 4.0}) {
    const double u = 2.0 * std::sqrt(4.0 * x);
    const double closed =
        1.0 - 2.0 / std::tgamma(4.0) * std::pow(0.5 * u, 4.0) * bessel_k(4.0, u);
    CHECK(gk_cdf(x, prod) == doctest::Approx(closed).epsilon(1e-8));
  }
}

TEST_CASE("gk_cdf is a proper monotone CDF") {
  const GKParams p{4.0, 2.0, 1.5};
  double prev = 0.0;
  for (double x = 0.0; x <= 12.0; x += 0.5) {
    const double v = gk_cdf(x, p);
    CHECK(v >= prev - 1e-12);
    CHECK(v <= 1.0);
    prev = v;
  }
  CHECK(gk_cdf(1000.0 * p.omega, p) >= 0.9999);
}

TEST_CASE("gk_cdf matches a gamma-product sampling oracle") {
  // z = g1 * g2 with g1 ~ Gamma(k = 4, O/k), g2 ~ Exp(1): generalized-K(4,1,O)
  const GKParams p{4.0, 1.0, 1.0};
  const int n = 1000000;
  RngStream rng(33);
  std::vector<double> samples(n);
  for (auto& s : samples) {
    double g1 = 0.0;
    for (int j = 0; j < 4; ++j) g1 += -std::log(1.0 - rng.next_double());
    const double g2 = -std::log(1.0 - rng.next_double());
    s = (p.omega / 4.0) * g1 * g2;
  }
  std::sort(samples.begin(), samples.end());
  // sup over a 256-point grid spanning the bulk of the law
  double ks = 0.0;
  for (int g = 1; g <= 256; ++g) {
    const double x = 12.0 * g / 256.0;
    const double theory = gk_cdf(x, p);
    const std::size_t below =
        std::lower_bound(samples.begin(), samples.end(), x) - samples.begin();
    ks = std::max(ks, std::fabs(static_cast<double>(below) / n - theory));
  }
  CHECK(ks <= 0.003);
}

TEST_CASE("gk_sum_params moment matching") {
  const GKParams single = gk_sum_params(1, 4, 0.3);
  CHECK(single.k == 4.0);
  CHECK(single.m == 1.0);
  CHECK(single.omega == doctest::Approx(0.3).epsilon(1e-15));

  const GKParams four = gk_sum_params(4, 4, 1.0);
  CHECK(four.k == doctest::Approx(10.0561018862).epsilon(1e-9));
  CHECK(four.m == 4.0);
  CHECK(four.omega == doctest::Approx(4.0).epsilon(1e-15));

  // variance decreases with the number of taps for fixed M
  double prev = 1e300;
  for (int taps : {1, 2, 4, 16}) {
    const GKParams p = gk_sum_params(4, taps, 1.0);
    const double var = p.omega * p.omega * (p.k + p.m + 1.0) / (p.k * p.m);
    CHECK(var < prev);
    prev = var;
  }
  CHECK_THROWS_AS(gk_sum_params(0, 4, 1.0), std::invalid_argument);
}

TEST_CASE("outage_general decreases in power and hits the exact closed form") {
  const GKParams p{1.0, 1.0, 1.0};
  const OutageQuery base{1.0, 1.0, 2.0, 1.0};  // a1 = gamma_th = 3
  double prev = 1.0;
  for (double pt : {1.0, 3.0, 10.0, 100.0, 1e4}) {
    const OutageQuery q{pt, 1.0, 2.0, 1.0};
    const double out = outage_general(q, p);
    CHECK(out < prev);
    prev = out;
  }
  // at a1/p_t = 1: P_out = 1 - 2 K_1(2)
  const OutageQuery q{base.a1(), 1.0, 2.0, 1.0};
  CHECK(outage_general(q, p) == doctest::Approx(0.7202682153680).epsilon(1e-7));
}

TEST_CASE("outage_general is invariant to a common power/noise scaling") {
  const GKParams p = gk_sum_params(2, 4, 1e-12);
  for (double c : {0.1, 7.0, 1e3}) {
    const OutageQuery q1{5.0, 1e-13, 2.0, 128.0 / 131.0};
    const OutageQuery q2{c * 5.0, c * 1e-13, 2.0, 128.0 / 131.0};
    CHECK(outage_general(q1, p) ==
          doctest::Approx(outage_general(q2, p)).epsilon(1e-9));
  }
}

TEST_CASE("Lemma-1 slopes: outage_general decays with exponent m") {
  for (const GKParams& p :
       {GKParams{4.0, 1.0, 1.0}, GKParams{10.056101886184106, 4.0, 4.0}}) {
    const double a1 = 3.0;  // R = 2, sigma2 = dgamma = 1
    std::vector<std::pair<double, double>> pts;
    for (double f : {1e4, 3.16e4, 1e5, 3.16e5, 1e6}) {
      const OutageQuery q{f * a1, 1.0, 2.0, 1.0};
      pts.emplace_back(q.p_t, outage_general(q, p));
    }
    CHECK(diversity_slope(pts) == doctest::Approx(p.m).epsilon(0.1 / p.m));
  }
}

TEST_CASE("outage_special closed form, slope, and Monte Carlo agreement") {
  // M = 1, L_g = 1: P_out = 1 - exp(-a3 / (2 p_t))
  const OutageQuery q{2.0, 1.0, 2.0, 1.0};
  const double a3 = 2.0 * q.a1() * 1.0 / 1.0;
  CHECK(outage_special(q, 1, 1, 1.0, 1.0) ==
        doctest::Approx(1.0 - std::exp(-a3 / (2.0 * q.p_t))).epsilon(1e-12));

  // high-SNR slope M L_g
  std::vector<std::pair<double, double>> pts;
  for (double f : {1e4, 1e5, 1e6}) {
    const OutageQuery qq{f, 1.0, 2.0, 1.0};
    pts.emplace_back(f, outage_special(qq, 2, 2, 1.0, 1.0));
  }
  CHECK(diversity_slope(pts) == doctest::Approx(4.0).epsilon(0.01));

  // Monte Carlo over the LoS regime at a probability around 1e-2
  ChannelParams p;
  p.antennas = 2;
  p.taps = 2;
  p.block_size = 16;
  p.delay_step = 8;
  p.zp_len = 4;
  p.beta_forward = 1.0;
  p.beta_backward = 1.0;
  p.beta_direct = 1.0;
  p.regime = ChannelRegime::LosForward;
  const double p_t = 40.0;
  const OutageQuery qmc{p_t, 1.0, 2.0, 1.0};
  const double threshold = qmc.a1() / p_t;
  RngStream rng(44);
  const int draws = 200000;
  int outages = 0;
  for (int i = 0; i < draws; ++i)
    if (sample_cascaded_gain(p, rng) < threshold) ++outages;
  const double mc = static_cast<double>(outages) / draws;
  const double theory = outage_special(qmc, 2, 2, 1.0, 1.0);
  const double sigma = std::sqrt(theory * (1.0 - theory) / draws);
  CHECK(std::fabs(mc - theory) <= 3.0 * sigma);
}

TEST_CASE("theoretical_ber endpoints and monotonicity") {
  CHECK(theoretical_ber(0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(theoretical_ber(9.0) == doctest::Approx(1.3499e-3).epsilon(1e-4));
  double prev = 0.6;
  for (double g : {0.0, 0.5, 2.0, 9.0, 25.0}) {
    const double v = theoretical_ber(g);
    CHECK(v < prev);
    prev = v;
  }
  CHECK_THROWS_AS(theoretical_ber(-1.0), std::invalid_argument);
}

TEST_CASE("diversity_slope recovers exact power laws and validates input") {
  std::vector<std::pair<double, double>> unit, quartic;
  for (double pt : {1.0, 10.0, 100.0, 1000.0}) {
    unit.emplace_back(pt, 0.37 / pt);
    quartic.emplace_back(pt, 2.1 / (pt * pt * pt * pt));
  }
  CHECK(diversity_slope(unit) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(diversity_slope(quartic) == doctest::Approx(4.0).epsilon(1e-6));

  CHECK_THROWS_AS(diversity_slope({{1.0, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(diversity_slope({{1.0, 0.5}, {2.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(diversity_slope({{2.0, 0.5}, {1.0, 0.1}}), std::invalid_argument);

  // outage_special with M = 2, L_g = 2 fitted over 40-60 dB lands near 4
  std::vector<std::pair<double, double>> deep;
  for (double db = 40.0; db <= 60.0; db += 5.0) {
    const double pt = std::pow(10.0, db / 10.0);
    const OutageQuery q{pt, 1.0, 2.0, 1.0};
    deep.emplace_back(pt, outage_special(q, 2, 2, 1.0, 1.0));
  }
  const double slope = diversity_slope(deep);
  CHECK(slope >= 3.7);
  CHECK(slope <= 4.3);
}

TEST_CASE("mfb_snr in the LoS regime does not depend on the AoA") {
  ChannelParams p;
  p.antennas = 4;
  p.taps = 2;
  p.block_size = 16;
  p.delay_step = 4;
  p.zp_len = 4;
  p.regime = ChannelRegime::LosForward;
  for (int trial = 0; trial < 10; ++trial) {
    p.los_aoa = 0.0;
    RngStream rng_a(500 + trial);
    const ChannelRealization ch_a = sample_channels(p, rng_a);
    p.los_aoa = M_PI / 3.0;
    RngStream rng_b(500 + trial);  // same backward-link draws
    const ChannelRealization ch_b = sample_channels(p, rng_b);
    CHECK(mfb_snr(ch_a, 2.0, 1e-13, 0.97) ==
          doctest::Approx(mfb_snr(ch_b, 2.0, 1e-13, 0.97)).epsilon(1e-12));
  }
}
