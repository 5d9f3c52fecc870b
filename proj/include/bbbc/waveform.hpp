// waveform.hpp - BD-side signal construction
//
// Symbol mapping (Gray PSK), quantized Zadoff-Chu pilots, cyclic delay
// shifts, zero padding, and frame assembly. The BD is reflection-limited, so
// every constellation point has unit modulus and ZP samples are true silence.
//
// QPSK bit map (MSB first): 00 -> (1+j)/sqrt2, 01 -> (-1+j)/sqrt2,
// 11 -> (-1-j)/sqrt2, 10 -> (1-j)/sqrt2 (Gray ring, counterclockwise).

#pragma once

#include <cstdint>
#include <vector>

#include "bbbc/numerics.hpp"

namespace bbbc {

using BitVec = std::vector<std::uint8_t>;

struct ModulationAlphabet {
  cvec points;         // ring order: points[k] = exp(j(pi/size + 2 pi k/size))
  int bits_per_symbol;

  static ModulationAlphabet qpsk();
  static ModulationAlphabet psk(int bits_per_symbol);

  std::size_t size() const { return points.size(); }
  // binary-reflected Gray map between bit values and ring positions
  unsigned index_of_bits(unsigned bits) const { return bits ^ (bits >> 1); }
  unsigned bits_of_index(unsigned index) const;
};

// minimum-Euclidean-distance decision; exact ties go to the lowest index
std::size_t nearest_point(cplx s, const ModulationAlphabet& alphabet);

cvec modulate(const BitVec& bits, const ModulationAlphabet& alphabet);
BitVec demodulate(const cvec& symbols, const ModulationAlphabet& alphabet);

// Zadoff-Chu sequence of length n (root coprime with n), each element
// quantized to the nearest-phase alphabet point; exact phase ties alternate
// between the smaller and larger phase so the quantized pilot keeps a
// full-rank circulant (a constant tie direction nulls DFT bins)
cvec generate_pilot_block(int n, const ModulationAlphabet& alphabet,
                          int root = 1);

// applies T^d: out[i] = in[(i - d) mod N], so one step maps [a,b,c,d] to
// [d,a,b,c]
cvec cyclic_shift(const cvec& block, std::size_t d);

cvec zero_pad(const cvec& block, std::size_t n_zp);

struct CddConfig {
  int antennas = 1;    // M
  int delay_step = 0;  // D; antenna m (0-based) gets delay m*D
  int delay_of(int m) const { return m * delay_step; }
};

struct Frame {
  std::vector<cvec> pilot_blocks;  // size 2; pilot_blocks[1] = -pilot_blocks[0]
  std::vector<cvec> data_blocks;
  BitVec payload_bits;

  std::size_t block_count() const {
    return pilot_blocks.size() + data_blocks.size();
  }
  const cvec& block(std::size_t i) const {
    return i < pilot_blocks.size() ? pilot_blocks[i]
                                   : data_blocks[i - pilot_blocks.size()];
  }
};

// frame = [pilot, -pilot, data...]; payload length must divide into whole
// blocks of n symbols
Frame build_frame(const BitVec& payload, int n,
                  const ModulationAlphabet& alphabet, int zc_root = 1);

}  // namespace bbbc
