#include "bbbc/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace bbbc {

namespace {

std::uint64_t splitmix64(std::uint64_t& s) {
  s += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t mix_value(std::uint64_t v) {
  std::uint64_t s = v;
  return splitmix64(s);
}

std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed,
                     std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = master_seed;
  for (std::uint64_t p : path) {
    splitmix64(s);
    s ^= mix_value(p);
  }
  for (auto& w : state_) w = splitmix64(s);
  // xoshiro256++ requires a nonzero state; the SplitMix64 fill makes an
  // all-zero state astronomically unlikely, but guard anyway
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RngStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * next_double() - 1.0;
    v = 2.0 * next_double() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

std::complex<double> RngStream::next_cscg(double variance) {
  if (variance < 0.0) throw std::invalid_argument("cscg variance must be >= 0");
  if (variance == 0.0) return {0.0, 0.0};
  const double scale = std::sqrt(variance / 2.0);
  const double re = next_gaussian();
  const double im = next_gaussian();
  return {scale * re, scale * im};
}

}  // namespace bbbc
