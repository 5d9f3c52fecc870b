#include "bbbc/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace bbbc {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double pathloss(double distance_m, double exponent) {
  if (!(distance_m > 0.0)) throw std::invalid_argument("pathloss: distance must be > 0");
  return 1e-3 * std::pow(distance_m, -exponent);
}

void ChannelParams::validate() const {
  if (antennas < 1 || taps < 1 || block_size < 1)
    throw std::invalid_argument("channel: M, L_g, N must be positive");
  if (delay_step < taps)
    throw std::invalid_argument("channel: delay step D must be >= L_g");
  if (delay_step > block_size / antennas)
    throw std::invalid_argument("channel: delay step D must be <= floor(N/M)");
  if (block_size < antennas * taps)
    throw std::invalid_argument("channel: N must be >= M*L_g");
  if (zp_len <= taps)
    throw std::invalid_argument("channel: N_zp must be > L_g");
  if (!(los_spacing_ratio > 0.0))
    throw std::invalid_argument("channel: antenna spacing ratio must be > 0");
}

double ChannelRealization::cascaded_energy() const {
  double e = 0.0;
  for (const auto& hm : cascaded)
    for (const auto& tap : hm) e += std::norm(tap);
  return e;
}

namespace {

cplx draw_forward(const ChannelParams& p, int m, RngStream& rng) {
  if (p.regime == ChannelRegime::LosForward) {
    const double phase =
        -2.0 * kPi * static_cast<double>(m) * p.los_spacing_ratio * std::sin(p.los_aoa);
    return std::sqrt(p.beta_forward) * cplx(std::cos(phase), std::sin(phase));
  }
  return rng.next_cscg(p.beta_forward);
}

}  // namespace

ChannelRealization sample_channels(const ChannelParams& p, RngStream& rng) {
  p.validate();
  ChannelRealization ch;
  ch.direct_gain = rng.next_cscg(p.beta_direct);
  ch.forward.resize(static_cast<std::size_t>(p.antennas));
  ch.backward.resize(static_cast<std::size_t>(p.antennas));
  ch.cascaded.resize(static_cast<std::size_t>(p.antennas));
  const double tap_var = p.beta_backward / static_cast<double>(p.taps);
  for (int m = 0; m < p.antennas; ++m) {
    ch.forward[m] = draw_forward(p, m, rng);
    ch.backward[m].resize(static_cast<std::size_t>(p.taps));
    ch.cascaded[m].resize(static_cast<std::size_t>(p.taps));
    for (int l = 0; l < p.taps; ++l) {
      ch.backward[m][l] = rng.next_cscg(tap_var);
      ch.cascaded[m][l] = ch.forward[m] * ch.backward[m][l];
    }
  }
  ch.h_eq = equivalent_cir(ch.cascaded, p.delay_step, p.block_size);
  return ch;
}

double sample_cascaded_gain(const ChannelParams& p, RngStream& rng) {
  p.validate();
  (void)rng.next_cscg(p.beta_direct);  // keep draw order identical to sample_channels
  const double tap_var = p.beta_backward / static_cast<double>(p.taps);
  double total = 0.0;
  for (int m = 0; m < p.antennas; ++m) {
    const double f2 = std::norm(draw_forward(p, m, rng));
    double g2 = 0.0;
    for (int l = 0; l < p.taps; ++l) g2 += std::norm(rng.next_cscg(tap_var));
    total += f2 * g2;
  }
  return total;
}

cvec equivalent_cir(const std::vector<cvec>& cascaded, int delay_step,
                    int block_size) {
  const int antennas = static_cast<int>(cascaded.size());
  if (antennas < 1) throw std::invalid_argument("equivalent_cir: no antennas");
  const int taps = static_cast<int>(cascaded[0].size());
  if (delay_step < taps || delay_step > block_size / antennas ||
      block_size < antennas * taps)
    throw std::invalid_argument("equivalent_cir: delay constraint violated");
  cvec h_eq(static_cast<std::size_t>(block_size), cplx(0.0, 0.0));
  for (int m = 0; m < antennas; ++m) {
    if (static_cast<int>(cascaded[m].size()) != taps)
      throw std::invalid_argument("equivalent_cir: ragged tap counts");
    for (int l = 0; l < taps; ++l)
      h_eq[static_cast<std::size_t>(m * delay_step + l)] = cascaded[m][l];
  }
  return h_eq;
}

cvec propagate(const Frame& frame, const ChannelRealization& ch,
               const ChannelParams& p, double p_t, double sigma2,
               RngStream& rng) {
  if (p.zp_len <= p.taps)
    throw std::invalid_argument("propagate: N_zp must be > L_g");
  const std::size_t n = static_cast<std::size_t>(p.block_size);
  const std::size_t n_c = n + static_cast<std::size_t>(p.zp_len);
  const double amp = std::sqrt(p_t);
  cvec stream(frame.block_count() * n_c);
  std::size_t offset = 0;
  for (std::size_t b = 0; b < frame.block_count(); ++b) {
    const cvec& block = frame.block(b);
    cplx* out = stream.data() + offset;
    for (std::size_t i = 0; i < n_c; ++i) out[i] = cplx(0.0, 0.0);
    for (int m = 0; m < p.antennas; ++m) {
      const std::size_t delay = static_cast<std::size_t>(m) *
                                static_cast<std::size_t>(p.delay_step) % n;
      for (int l = 0; l < p.taps; ++l) {
        const cplx coef = ch.cascaded[m][l];
        // padded input is nonzero only on its first N entries, and the
        // convolution support ends before N_c because N_zp > L_g
        for (std::size_t i = 0; i < n; ++i)
          out[i + static_cast<std::size_t>(l)] += coef * block[(i + n - delay) % n];
      }
    }
    for (std::size_t i = 0; i < n_c; ++i)
      out[i] = amp * (out[i] + ch.direct_gain) + rng.next_cscg(sigma2);
    offset += n_c;
  }
  return stream;
}

}  // namespace bbbc
