#include "bbbc/waveform.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bbbc {

namespace {
constexpr double kPi = 3.14159265358979323846;

double normalized_phase(cplx p) {
  double ph = std::atan2(p.imag(), p.real());
  if (ph < 0.0) ph += 2.0 * kPi;
  return ph;
}
}  // namespace

ModulationAlphabet ModulationAlphabet::qpsk() { return psk(2); }

ModulationAlphabet ModulationAlphabet::psk(int bits_per_symbol) {
  if (bits_per_symbol < 1)
    throw std::invalid_argument("psk: bits_per_symbol must be >= 1");
  const std::size_t m = std::size_t{1} << bits_per_symbol;
  ModulationAlphabet a;
  a.bits_per_symbol = bits_per_symbol;
  a.points.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double phase =
        kPi / static_cast<double>(m) +
        2.0 * kPi * static_cast<double>(k) / static_cast<double>(m);
    a.points[k] = cplx(std::cos(phase), std::sin(phase));
  }
  return a;
}

unsigned ModulationAlphabet::bits_of_index(unsigned index) const {
  unsigned b = index;
  for (unsigned shift = 1; shift < 8 * sizeof(unsigned); shift <<= 1)
    b ^= b >> shift;
  return b;
}

std::size_t nearest_point(cplx s, const ModulationAlphabet& alphabet) {
  std::size_t best = 0;
  double best_d2 = std::norm(s - alphabet.points[0]);
  for (std::size_t i = 1; i < alphabet.points.size(); ++i) {
    const double d2 = std::norm(s - alphabet.points[i]);
    if (d2 < best_d2) {
      best = i;
      best_d2 = d2;
    }
  }
  return best;
}

cvec modulate(const BitVec& bits, const ModulationAlphabet& alphabet) {
  const int bps = alphabet.bits_per_symbol;
  if (bits.size() % static_cast<std::size_t>(bps) != 0)
    throw std::invalid_argument("modulate: bit count not divisible by bits_per_symbol");
  cvec out(bits.size() / static_cast<std::size_t>(bps));
  for (std::size_t i = 0; i < out.size(); ++i) {
    unsigned value = 0;
    for (int b = 0; b < bps; ++b)
      value = (value << 1) | (bits[i * bps + b] & 1u);
    out[i] = alphabet.points[alphabet.index_of_bits(value)];
  }
  return out;
}

BitVec demodulate(const cvec& symbols, const ModulationAlphabet& alphabet) {
  const int bps = alphabet.bits_per_symbol;
  BitVec out(symbols.size() * static_cast<std::size_t>(bps));
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    const unsigned value =
        alphabet.bits_of_index(static_cast<unsigned>(nearest_point(symbols[i], alphabet)));
    for (int b = 0; b < bps; ++b)
      out[i * bps + b] = static_cast<std::uint8_t>((value >> (bps - 1 - b)) & 1u);
  }
  return out;
}

cvec generate_pilot_block(int n, const ModulationAlphabet& alphabet, int root) {
  if (n < 1) throw std::invalid_argument("generate_pilot_block: n must be >= 1");
  if (std::gcd(n, root) != 1)
    throw std::invalid_argument("generate_pilot_block: root must be coprime with n");
  // Phases are handled in units of pi with the ZC phase wrapped by integer
  // arithmetic, so halfway cases are exact ties. A constant tie direction
  // would stamp a rigid comb onto the tie samples (n = 0 mod N/16 for QPSK at
  // N = 128) that nulls DFT bins and makes the pilot circulant singular for
  // every root, so successive ties alternate between the smaller and the
  // larger phase. Deterministic for fixed (n, root).
  constexpr double kTie = 1e-12;
  std::vector<double> point_phase(alphabet.points.size());
  for (std::size_t k = 0; k < alphabet.points.size(); ++k)
    point_phase[k] = normalized_phase(alphabet.points[k]) / kPi;  // [0, 2)
  const std::uint64_t period = 2ULL * static_cast<std::uint64_t>(n);
  const std::uint64_t root_mod =
      static_cast<std::uint64_t>(root % (2LL * n) + 2LL * n) % period;
  cvec out(static_cast<std::size_t>(n));
  int tie_count = 0;
  for (int i = 0; i < n; ++i) {
    // even n: x(i) = exp(-j pi u i^2 / n); odd n: exp(-j pi u i (i+1) / n)
    const std::uint64_t ii = static_cast<std::uint64_t>(i);
    const std::uint64_t num =
        (n % 2 == 0) ? (ii * ii) % period : (ii * (ii + 1)) % period;
    const std::uint64_t m = (root_mod * num) % period;
    const double zc_units = -static_cast<double>(m) / n;  // in (-2, 0]
    std::size_t lo = 0, hi = 0;
    double best_d = std::fabs(std::remainder(zc_units - point_phase[0], 2.0));
    for (std::size_t k = 1; k < alphabet.points.size(); ++k) {
      const double d = std::fabs(std::remainder(zc_units - point_phase[k], 2.0));
      if (d + kTie < best_d) {
        lo = hi = k;
        best_d = d;
      } else if (d < best_d + kTie) {
        best_d = std::min(d, best_d);
        if (point_phase[k] < point_phase[lo]) lo = k;
        if (point_phase[k] > point_phase[hi]) hi = k;
      }
    }
    std::size_t pick = lo;
    if (hi != lo) pick = (tie_count++ % 2 == 0) ? lo : hi;
    out[static_cast<std::size_t>(i)] = alphabet.points[pick];
  }
  return out;
}

cvec cyclic_shift(const cvec& block, std::size_t d) {
  const std::size_t n = block.size();
  if (n == 0) return {};
  d %= n;
  if (d == 0) return block;
  cvec out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = block[(i + n - d) % n];
  return out;
}

cvec zero_pad(const cvec& block, std::size_t n_zp) {
  cvec out = block;
  out.resize(block.size() + n_zp, cplx(0.0, 0.0));
  return out;
}

Frame build_frame(const BitVec& payload, int n,
                  const ModulationAlphabet& alphabet, int zc_root) {
  const std::size_t bits_per_block =
      static_cast<std::size_t>(n) * static_cast<std::size_t>(alphabet.bits_per_symbol);
  if (payload.size() % bits_per_block != 0)
    throw std::invalid_argument("build_frame: payload length must divide into whole blocks");
  Frame frame;
  frame.payload_bits = payload;
  cvec pilot = generate_pilot_block(n, alphabet, zc_root);
  cvec pilot_neg(pilot.size());
  for (std::size_t i = 0; i < pilot.size(); ++i) pilot_neg[i] = -pilot[i];
  frame.pilot_blocks = {std::move(pilot), std::move(pilot_neg)};
  const std::size_t n_blocks = payload.size() / bits_per_block;
  frame.data_blocks.reserve(n_blocks);
  for (std::size_t b = 0; b < n_blocks; ++b) {
    BitVec chunk(payload.begin() + static_cast<std::ptrdiff_t>(b * bits_per_block),
                 payload.begin() + static_cast<std::ptrdiff_t>((b + 1) * bits_per_block));
    frame.data_blocks.push_back(modulate(chunk, alphabet));
  }
  return frame;
}

}  // namespace bbbc
