#include "bbbc/receiver.hpp"

#include <algorithm>
#include <cmath>

namespace bbbc {

cplx estimate_direct_mean(std::span<const cplx> samples) {
  if (samples.empty())
    throw std::invalid_argument("estimate_direct_mean: empty stream");
  cplx acc(0.0, 0.0);
  for (const auto& s : samples) acc += s;
  return acc / static_cast<double>(samples.size());
}

cvec suppress_direct(const cvec& z, cplx z_bar) {
  cvec out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] - z_bar;
  return out;
}

cvec ola_noise_profile(int n, int taps) {
  cvec alpha(static_cast<std::size_t>(n), cplx(1.0, 0.0));
  for (int i = 0; i < taps - 1; ++i) alpha[static_cast<std::size_t>(i)] = cplx(2.0, 0.0);
  return alpha;
}

OlaBlock overlap_add(const cvec& z_hat, int n, int taps) {
  const int n_zp = static_cast<int>(z_hat.size()) - n;
  if (n_zp < 0) throw std::invalid_argument("overlap_add: block shorter than N");
  if (taps - 1 > n_zp)
    throw std::invalid_argument("overlap_add: L_g - 1 exceeds the guard length");
  OlaBlock out;
  out.taps = taps;
  out.y.assign(z_hat.begin(), z_hat.begin() + n);
  for (int i = 0; i < taps - 1; ++i)
    out.y[static_cast<std::size_t>(i)] += z_hat[static_cast<std::size_t>(n + i)];
  return out;
}

// ---------------------------------------------------------------------------
// LS estimation

namespace {

// in-place Cholesky L L^H of a Hermitian positive definite row-major matrix;
// throws when a pivot collapses (degenerate pilots)
void cholesky(cvec& a, int k) {
  double scale = 0.0;
  for (int i = 0; i < k; ++i) scale = std::max(scale, a[i * k + i].real());
  const double tol = scale * 1e-12;
  for (int j = 0; j < k; ++j) {
    double d = a[j * k + j].real();
    for (int p = 0; p < j; ++p) d -= std::norm(a[j * k + p]);
    if (!(d > tol))
      throw singular_estimation_error("ls_estimate: rank-deficient pilot normal matrix");
    const double ljj = std::sqrt(d);
    a[j * k + j] = ljj;
    for (int i = j + 1; i < k; ++i) {
      cplx v = a[i * k + j];
      for (int p = 0; p < j; ++p) v -= a[i * k + p] * std::conj(a[j * k + p]);
      a[i * k + j] = v / ljj;
    }
  }
}

// solve L L^H x = b with the factor above
void cholesky_solve(const cvec& l, int k, cvec& b) {
  for (int i = 0; i < k; ++i) {
    cplx v = b[i];
    for (int p = 0; p < i; ++p) v -= l[i * k + p] * b[p];
    b[i] = v / l[i * k + i].real();
  }
  for (int i = k - 1; i >= 0; --i) {
    cplx v = b[i];
    for (int p = i + 1; p < k; ++p) v -= std::conj(l[p * k + i]) * b[p];
    b[i] = v / l[i * k + i].real();
  }
}

}  // namespace

LsEstimator::LsEstimator(const cvec& pilot, const ChannelParams& p)
    : n_(p.block_size),
      taps_(p.taps),
      antennas_(p.antennas),
      delay_step_(p.delay_step),
      pilot_(pilot) {
  p.validate();
  if (static_cast<int>(pilot.size()) != n_)
    throw std::invalid_argument("ls_estimate: pilot length must equal N");
  const int k = antennas_ * taps_;
  // column j of C~ = C_p M_1 is the pilot cyclically shifted by
  // s_j = m D + l; the normal matrix is the Gram matrix of those shifts
  cvec gram(static_cast<std::size_t>(k) * k);
  auto shift_of = [this](int j) {
    return (j / taps_) * delay_step_ + (j % taps_);
  };
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) {
      const int sr = shift_of(r), sc = shift_of(c);
      cplx acc(0.0, 0.0);
      for (int i = 0; i < n_; ++i)
        acc += std::conj(pilot_[(i + n_ - sr) % n_]) * pilot_[(i + n_ - sc) % n_];
      gram[static_cast<std::size_t>(r) * k + c] = acc;
    }
  }
  cholesky(gram, k);
  chol_ = std::move(gram);
  alpha_ = ola_noise_profile(n_, taps_);
  alpha_norm2_ = 0.0;
  for (const auto& a : alpha_) alpha_norm2_ += std::norm(a);
}

ChannelEstimate LsEstimator::estimate(const OlaBlock& y_first,
                                      const OlaBlock& y_second,
                                      double p_t) const {
  if (!(p_t > 0.0)) throw std::invalid_argument("ls_estimate: p_t must be > 0");
  if (static_cast<int>(y_first.y.size()) != n_ ||
      static_cast<int>(y_second.y.size()) != n_)
    throw std::invalid_argument("ls_estimate: OLA blocks must have length N");
  const int k = antennas_ * taps_;
  const double inv_amp = 1.0 / std::sqrt(p_t);

  // anti-symmetric pilots decouple the normal equations:
  //   taps  = (2 C~^H C~)^-1 C~^H (y1 - y2) / sqrt(p_t)
  //   dh_d  = alpha^H (y1 + y2) / (2 ||alpha||^2 sqrt(p_t))
  cvec rhs(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    const int s = (j / taps_) * delay_step_ + (j % taps_);
    cplx acc(0.0, 0.0);
    for (int i = 0; i < n_; ++i)
      acc += std::conj(pilot_[(i + n_ - s) % n_]) * (y_first.y[i] - y_second.y[i]);
    rhs[static_cast<std::size_t>(j)] = acc * (0.5 * inv_amp);
  }
  cholesky_solve(chol_, k, rhs);

  cplx dsum(0.0, 0.0);
  for (int i = 0; i < n_; ++i)
    dsum += std::conj(alpha_[i]) * (y_first.y[i] + y_second.y[i]);

  ChannelEstimate est;
  est.per_antenna_taps = std::move(rhs);
  est.delta_hd_est = dsum * (0.5 * inv_amp / alpha_norm2_);
  std::vector<cvec> shaped(static_cast<std::size_t>(antennas_));
  for (int m = 0; m < antennas_; ++m)
    shaped[m].assign(est.per_antenna_taps.begin() + m * taps_,
                     est.per_antenna_taps.begin() + (m + 1) * taps_);
  est.h_eq_est = equivalent_cir(shaped, delay_step_, n_);
  return est;
}

ChannelEstimate ls_estimate(const OlaBlock& y_first, const OlaBlock& y_second,
                            const cvec& pilot, const ChannelParams& p,
                            double p_t) {
  return LsEstimator(pilot, p).estimate(y_first, y_second, p_t);
}

// ---------------------------------------------------------------------------
// frequency-domain equalization

cvec to_frequency_domain(const cvec& y, cplx delta_hd_est, double p_t,
                         const cvec& alpha) {
  if (!(p_t > 0.0))
    throw std::invalid_argument("to_frequency_domain: p_t must be > 0");
  if (alpha.size() != y.size())
    throw std::invalid_argument("to_frequency_domain: profile length mismatch");
  const double amp = std::sqrt(p_t);
  cvec work(y.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    work[i] = (y[i] - amp * delta_hd_est * alpha[i]) / amp;
  dft_inplace(work);
  return work;
}

cvec freq_response(const cvec& h_eq) {
  cvec lambda = dft(h_eq);
  const double root_n = std::sqrt(static_cast<double>(h_eq.size()));
  for (auto& v : lambda) v *= root_n;
  return lambda;
}

double snr_loss(int n, int taps) {
  return static_cast<double>(n) / static_cast<double>(n + taps - 1);
}

double gamma_bar(double p_t, double sigma2, int n, int taps) {
  return p_t * snr_loss(n, taps) / sigma2;
}

namespace {

void hard_decide(const cvec& soft, const ModulationAlphabet& alphabet,
                 cvec& hard, std::vector<std::size_t>* indices = nullptr) {
  hard.resize(soft.size());
  if (indices) indices->resize(soft.size());
  for (std::size_t i = 0; i < soft.size(); ++i) {
    const std::size_t k = nearest_point(soft[i], alphabet);
    hard[i] = alphabet.points[k];
    if (indices) (*indices)[i] = k;
  }
}

}  // namespace

EqualizerOutput equalize_zf(const cvec& y_freq, const cvec& lambda,
                            double gamma_bar, const ModulationAlphabet& alphabet) {
  if (y_freq.size() != lambda.size())
    throw std::invalid_argument("equalize_zf: size mismatch");
  const std::size_t n = lambda.size();
  double max_mag = 0.0;
  for (const auto& l : lambda) max_mag = std::max(max_mag, std::abs(l));
  const double floor = 1e-12 * max_mag;
  double inv_sum = 0.0;
  cvec work(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(lambda[i]) <= floor)
      throw singular_channel_error("equalize_zf: zero channel bin");
    work[i] = y_freq[i] / lambda[i];
    inv_sum += 1.0 / std::norm(lambda[i]);
  }
  idft_inplace(work);
  EqualizerOutput out;
  out.soft_symbols = std::move(work);
  hard_decide(out.soft_symbols, alphabet, out.hard_symbols);
  out.predicted_snr = gamma_bar * static_cast<double>(n) / inv_sum;
  return out;
}

EqualizerOutput equalize_mmse(const cvec& y_freq, const cvec& lambda,
                              double gamma_bar, const ModulationAlphabet& alphabet) {
  if (!(gamma_bar > 0.0))
    throw std::invalid_argument("equalize_mmse: gamma_bar must be > 0");
  if (y_freq.size() != lambda.size())
    throw std::invalid_argument("equalize_mmse: size mismatch");
  const std::size_t n = lambda.size();
  cvec work(n);
  double mmse_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double l2 = std::norm(lambda[i]);
    work[i] = std::conj(lambda[i]) * y_freq[i] / (l2 + 1.0 / gamma_bar);
    mmse_mean += 1.0 / (1.0 + gamma_bar * l2);
  }
  idft_inplace(work);
  EqualizerOutput out;
  out.soft_symbols = std::move(work);
  hard_decide(out.soft_symbols, alphabet, out.hard_symbols);
  out.predicted_snr = 1.0 / (mmse_mean / static_cast<double>(n)) - 1.0;
  return out;
}

GdfeStep bi_gdfe_step(const cvec& y_freq, const cvec& lambda, double gamma_bar,
                      double rho, const cvec& previous_decisions) {
  if (y_freq.size() != lambda.size())
    throw std::invalid_argument("bi_gdfe_step: size mismatch");
  const std::size_t n = lambda.size();
  cvec ffe_out(n);
  double alpha = 0.0;
  cvec f(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double denom = (1.0 - rho * rho) * std::norm(lambda[i]) + 1.0 / gamma_bar;
    f[i] = lambda[i] / denom;
    ffe_out[i] = std::conj(f[i]) * y_freq[i];
    alpha += (std::conj(f[i]) * lambda[i]).real();
  }
  alpha /= static_cast<double>(n);
  if (rho != 0.0) {
    cvec fb = previous_decisions;
    dft_inplace(fb);
    for (std::size_t i = 0; i < n; ++i) {
      const cplx b = alpha - std::conj(f[i]) * lambda[i];
      ffe_out[i] += rho * b * fb[i];
    }
  }
  idft_inplace(ffe_out);
  return {std::move(ffe_out), alpha};
}

double bi_gdfe_sinr(const cvec& lambda, double gamma_bar, double rho) {
  const std::size_t n = lambda.size();
  double alpha = 0.0, sig2 = 0.0, noise = 0.0, fb2 = 0.0;
  std::vector<double> fl(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double l2 = std::norm(lambda[i]);
    const double denom = (1.0 - rho * rho) * l2 + 1.0 / gamma_bar;
    const double f_l = l2 / denom;  // conj(F_n) lambda_n, real
    fl[i] = f_l;
    noise += l2 / (denom * denom);
    alpha += f_l;
  }
  alpha /= static_cast<double>(n);
  noise /= gamma_bar * static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    b[i] = alpha - fl[i];
    fb2 += b[i] * b[i];
    const double t = fl[i] + rho * rho * b[i];
    sig2 += t * t;
  }
  fb2 /= static_cast<double>(n);
  sig2 /= static_cast<double>(n);
  // residual ISI from the data plus re-injected decision errors, then noise
  const double isi = (sig2 - alpha * alpha) + rho * rho * (1.0 - rho * rho) * fb2;
  return alpha * alpha / (isi + noise);
}

EqualizerOutput bi_gdfe(const cvec& y_freq, const cvec& lambda,
                        double gamma_bar, int max_iters,
                        const ModulationAlphabet& alphabet) {
  if (max_iters < 1)
    throw std::invalid_argument("bi_gdfe: max_iters must be >= 1");
  EqualizerOutput out;
  double rho = 0.0;
  std::vector<std::size_t> prev_idx, cur_idx;
  cvec hard;
  double sinr = 0.0;
  for (int l = 1; l <= max_iters; ++l) {
    GdfeStep step = bi_gdfe_step(y_freq, lambda, gamma_bar, rho, hard);
    hard_decide(step.soft, alphabet, hard, &cur_idx);
    sinr = bi_gdfe_sinr(lambda, gamma_bar, rho);
    out.soft_symbols = std::move(step.soft);
    out.iterations_used = l;
    if (l > 1 && cur_idx == prev_idx) break;
    prev_idx = cur_idx;
    rho = std::min(0.9999, std::max(0.0, 1.0 - 2.0 * q_function(std::sqrt(sinr))));
  }
  out.hard_symbols = std::move(hard);
  out.predicted_snr = sinr;
  return out;
}

}  // namespace bbbc
