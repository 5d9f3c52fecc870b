// benchmarks.hpp - CSI-free baseline transmission schemes
//
// Alamouti space-time coding over two antenna groups, random unit-modulus
// beamforming, and direct (all-one) backscattering, all for a flat backward
// link (L_g = 1) with genie channel knowledge and ML detection at the reader.

#pragma once

#include <array>

#include "bbbc/channel.hpp"
#include "bbbc/rng.hpp"
#include "bbbc/waveform.hpp"

namespace bbbc {

enum class BenchmarkKind { AlamoutiGrouped, RandomBeamforming, DirectBackscatter };

struct BenchmarkScheme {
  BenchmarkKind kind;
  cvec beam_weights;  // unit modulus, size M; unused by Alamouti

  static BenchmarkScheme direct(int antennas);
  // phases uniform on [0, 2pi), drawn once per realization
  static BenchmarkScheme random_beam(int antennas, RngStream& rng);
  static BenchmarkScheme alamouti(int antennas);  // requires even M
};

// h_eff = sum_m w_m f_m g_m(0); Direct/Random only, flat backward link
cplx effective_scalar_channel(const BenchmarkScheme& scheme,
                              const ChannelRealization& ch);

// group channels (h1, h2) with groups {1..M/2} and {M/2+1..M}
std::array<cplx, 2> alamouti_group_channels(const ChannelRealization& ch);

// Alamouti combining (ML for the orthogonal code) + nearest-point decisions;
// received holds the two slot observations for one code block
std::array<cplx, 2> alamouti_detect(const std::array<cplx, 2>& received,
                                    const std::array<cplx, 2>& h, double p_t,
                                    const ModulationAlphabet& alphabet);

// per-symbol matched filter + nearest-point decision (ML for a scalar channel)
cvec scalar_ml_detect(const cvec& received, cplx h_eff, double p_t,
                      const ModulationAlphabet& alphabet);

}  // namespace bbbc
