// rng.hpp - deterministic random streams for Monte Carlo runs
//
// A stream is an xoshiro256++ generator whose state is filled by a SplitMix64
// chain over (master_seed, path...). Every (experiment, sweep point,
// realization) tuple derives its own stream, so results do not depend on how
// realizations are scheduled across workers.
//
// Seeding scheme: s = master_seed; for each path element p, s is advanced by
// one SplitMix64 step and XORed with splitmix64(p); the final s seeds four
// further SplitMix64 steps that become the xoshiro256++ state.

#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>

namespace bbbc {

class RngStream {
 public:
  explicit RngStream(std::uint64_t master_seed,
                     std::initializer_list<std::uint64_t> path = {});

  std::uint64_t next_u64();

  // uniform on [0, 1), 53-bit resolution
  double next_double();

  // standard normal via the Marsaglia polar method
  double next_gaussian();

  // circularly symmetric complex Gaussian CN(0, variance)
  std::complex<double> next_cscg(double variance);

 private:
  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace bbbc
