// config.hpp - system configuration (Table-style defaults) and the flat
// key = value config-file format
//
// Config files are UTF-8 text, one `key = value` pair per line, `#` comments;
// keys are exactly the field names below. Unknown keys are rejected.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "bbbc/channel.hpp"

namespace bbbc {

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SystemConfig {
  int N = 128;
  int N_zp = 16;
  int N_p = 2;
  double sigma2 = 1e-13;  // -100 dBm, W
  std::string modulation = "QPSK";
  int M = 16;
  int D = 0;  // 0 = floor(N / M)
  int L_g = 4;
  double d_d = 100.0, d_f = 10.0, d_g = 100.0;  // meters
  double v_d = 3.0, v_f = 2.0, v_g = 2.0;       // path-loss exponents
  std::string regime = "general";               // general | los
  std::string equalizer = "all";                // zf | mmse | bigdfe | mfb | all
  std::string csi = "both";                     // perfect | estimated | both
  double R = 2.0;                               // target rate, bps/Hz
  int bi_gdfe_iters = 4;
  int mean_window_blocks = 0;  // 0 = whole frame
  long realizations = 100000;
  std::uint64_t master_seed = 1;
  int data_blocks = 8;
  int zc_root = 1;
  double los_r = 0.5;
  double los_theta = 0.0;
  int workers = 0;  // 0 = hardware concurrency

  int delay_step() const { return D > 0 ? D : N / M; }
  double beta1() const { return pathloss(d_f, v_f); }
  double beta2() const { return pathloss(d_g, v_g); }
  double beta_d() const { return pathloss(d_d, v_d); }
  double delta_gamma() const;
  // inverts the average-SNR definition snr = p_t b1 b2 / sigma2
  double p_t_for_snr_db(double snr_db) const;

  ChannelParams channel_params() const;
  ModulationAlphabet alphabet() const;

  void validate() const;  // throws config_error
};

// keys present in the file override the base config
SystemConfig load_config_file(const std::string& path,
                              const SystemConfig& base = SystemConfig{});

// applies one `key=value` pair; throws config_error for unknown keys or
// unparsable values
void apply_config_value(SystemConfig& cfg, const std::string& key,
                        const std::string& value);

}  // namespace bbbc
