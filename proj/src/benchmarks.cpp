#include "bbbc/benchmarks.hpp"

#include <cmath>
#include <stdexcept>

namespace bbbc {

namespace {
constexpr double kPi = 3.14159265358979323846;

void require_flat(const ChannelRealization& ch) {
  for (const auto& g : ch.backward)
    if (g.size() != 1)
      throw std::invalid_argument("benchmarks: backward link must be flat (L_g = 1)");
}
}  // namespace

BenchmarkScheme BenchmarkScheme::direct(int antennas) {
  return {BenchmarkKind::DirectBackscatter,
          cvec(static_cast<std::size_t>(antennas), cplx(1.0, 0.0))};
}

BenchmarkScheme BenchmarkScheme::random_beam(int antennas, RngStream& rng) {
  BenchmarkScheme s{BenchmarkKind::RandomBeamforming,
                    cvec(static_cast<std::size_t>(antennas))};
  for (auto& w : s.beam_weights) {
    const double phase = 2.0 * kPi * rng.next_double();
    w = cplx(std::cos(phase), std::sin(phase));
  }
  return s;
}

BenchmarkScheme BenchmarkScheme::alamouti(int antennas) {
  if (antennas % 2 != 0)
    throw std::invalid_argument("benchmarks: Alamouti grouping needs even M");
  return {BenchmarkKind::AlamoutiGrouped,
          cvec(static_cast<std::size_t>(antennas), cplx(1.0, 0.0))};
}

cplx effective_scalar_channel(const BenchmarkScheme& scheme,
                              const ChannelRealization& ch) {
  if (scheme.kind == BenchmarkKind::AlamoutiGrouped)
    throw std::invalid_argument("benchmarks: Alamouti has a channel pair, not a scalar");
  require_flat(ch);
  cplx h_eff(0.0, 0.0);
  for (std::size_t m = 0; m < ch.forward.size(); ++m)
    h_eff += scheme.beam_weights[m] * ch.cascaded[m][0];
  return h_eff;
}

std::array<cplx, 2> alamouti_group_channels(const ChannelRealization& ch) {
  require_flat(ch);
  const std::size_t m = ch.forward.size();
  if (m % 2 != 0)
    throw std::invalid_argument("benchmarks: Alamouti grouping needs even M");
  std::array<cplx, 2> h{cplx(0.0, 0.0), cplx(0.0, 0.0)};
  for (std::size_t i = 0; i < m; ++i) h[i < m / 2 ? 0 : 1] += ch.cascaded[i][0];
  return h;
}

std::array<cplx, 2> alamouti_detect(const std::array<cplx, 2>& received,
                                    const std::array<cplx, 2>& h, double p_t,
                                    const ModulationAlphabet& alphabet) {
  // slot 1 carries (s1, s2), slot 2 carries (-s2*, s1*)
  const double amp = std::sqrt(p_t);
  const cplx s1 = std::conj(h[0]) * received[0] + h[1] * std::conj(received[1]);
  const cplx s2 = std::conj(h[1]) * received[0] - h[0] * std::conj(received[1]);
  const double gain = amp * (std::norm(h[0]) + std::norm(h[1]));
  const double scale = gain > 0.0 ? 1.0 / gain : 1.0;
  return {alphabet.points[nearest_point(s1 * scale, alphabet)],
          alphabet.points[nearest_point(s2 * scale, alphabet)]};
}

cvec scalar_ml_detect(const cvec& received, cplx h_eff, double p_t,
                      const ModulationAlphabet& alphabet) {
  const double amp = std::sqrt(p_t);
  const double g = amp * std::norm(h_eff);
  const double scale = g > 0.0 ? 1.0 / g : 1.0;
  cvec out(received.size());
  for (std::size_t i = 0; i < received.size(); ++i) {
    const cplx mf = std::conj(h_eff) * received[i] * scale;
    out[i] = alphabet.points[nearest_point(mf, alphabet)];
  }
  return out;
}

}  // namespace bbbc
