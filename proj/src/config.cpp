#include "bbbc/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bbbc/receiver.hpp"

namespace bbbc {

double SystemConfig::delta_gamma() const { return snr_loss(N, L_g); }

double SystemConfig::p_t_for_snr_db(double snr_db) const {
  return std::pow(10.0, snr_db / 10.0) * sigma2 / (beta1() * beta2());
}

ChannelParams SystemConfig::channel_params() const {
  ChannelParams p;
  p.antennas = M;
  p.taps = L_g;
  p.block_size = N;
  p.delay_step = delay_step();
  p.zp_len = N_zp;
  p.beta_forward = beta1();
  p.beta_backward = beta2();
  p.beta_direct = beta_d();
  p.regime = regime == "los" ? ChannelRegime::LosForward
                             : ChannelRegime::GeneralRayleigh;
  p.los_spacing_ratio = los_r;
  p.los_aoa = los_theta;
  return p;
}

ModulationAlphabet SystemConfig::alphabet() const {
  if (modulation == "QPSK") return ModulationAlphabet::qpsk();
  throw config_error("unsupported modulation: " + modulation);
}

void SystemConfig::validate() const {
  auto fail = [](const std::string& msg) { throw config_error("config: " + msg); };
  if (N < 1) fail("N must be positive");
  if (M < 1) fail("M must be positive");
  if (L_g < 1) fail("L_g must be positive");
  if (N_p != 2) fail("N_p must be 2");
  if (delay_step() < L_g) fail("D must be >= L_g");
  if (delay_step() > N / M) fail("D must be <= floor(N/M)");
  if (N < M * L_g) fail("N must be >= M*L_g");
  if (N_zp <= L_g) fail("N_zp must be > L_g");
  if (!(sigma2 > 0.0)) fail("sigma2 must be > 0");
  if (modulation != "QPSK") fail("unsupported modulation: " + modulation);
  if (regime != "general" && regime != "los") fail("regime must be general or los");
  if (equalizer != "zf" && equalizer != "mmse" && equalizer != "bigdfe" &&
      equalizer != "mfb" && equalizer != "all")
    fail("equalizer must be zf, mmse, bigdfe, mfb or all");
  if (csi != "perfect" && csi != "estimated" && csi != "both")
    fail("csi must be perfect, estimated or both");
  if (d_d <= 0.0 || d_f <= 0.0 || d_g <= 0.0) fail("distances must be > 0");
  if (v_d < 0.0 || v_f < 0.0 || v_g < 0.0) fail("path-loss exponents must be >= 0");
  if (bi_gdfe_iters < 1) fail("bi_gdfe_iters must be >= 1");
  if (mean_window_blocks < 0) fail("mean_window_blocks must be >= 0");
  if (realizations < 1) fail("realizations must be >= 1");
  if (data_blocks < 0) fail("data_blocks must be >= 0");
  if (!(los_r > 0.0)) fail("los_r must be > 0");
  if (workers < 0) fail("workers must be >= 0");
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

long parse_long(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw config_error("config: bad integer for " + key + ": '" + value + "'");
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw config_error("config: bad number for " + key + ": '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw config_error("config: bad seed for " + key + ": '" + value + "'");
  }
}

}  // namespace

void apply_config_value(SystemConfig& cfg, const std::string& key,
                        const std::string& value) {
  if (key == "N") cfg.N = static_cast<int>(parse_long(key, value));
  else if (key == "N_zp") cfg.N_zp = static_cast<int>(parse_long(key, value));
  else if (key == "N_p") cfg.N_p = static_cast<int>(parse_long(key, value));
  else if (key == "sigma2") cfg.sigma2 = parse_double(key, value);
  else if (key == "modulation") cfg.modulation = value;
  else if (key == "M") cfg.M = static_cast<int>(parse_long(key, value));
  else if (key == "D") cfg.D = static_cast<int>(parse_long(key, value));
  else if (key == "L_g") cfg.L_g = static_cast<int>(parse_long(key, value));
  else if (key == "d_d") cfg.d_d = parse_double(key, value);
  else if (key == "d_f") cfg.d_f = parse_double(key, value);
  else if (key == "d_g") cfg.d_g = parse_double(key, value);
  else if (key == "v_d") cfg.v_d = parse_double(key, value);
  else if (key == "v_f") cfg.v_f = parse_double(key, value);
  else if (key == "v_g") cfg.v_g = parse_double(key, value);
  else if (key == "regime") cfg.regime = value;
  else if (key == "equalizer") cfg.equalizer = value;
  else if (key == "csi") cfg.csi = value;
  else if (key == "R") cfg.R = parse_double(key, value);
  else if (key == "bi_gdfe_iters") cfg.bi_gdfe_iters = static_cast<int>(parse_long(key, value));
  else if (key == "mean_window_blocks") cfg.mean_window_blocks = static_cast<int>(parse_long(key, value));
  else if (key == "realizations") cfg.realizations = parse_long(key, value);
  else if (key == "master_seed") cfg.master_seed = parse_u64(key, value);
  else if (key == "data_blocks") cfg.data_blocks = static_cast<int>(parse_long(key, value));
  else if (key == "zc_root") cfg.zc_root = static_cast<int>(parse_long(key, value));
  else if (key == "los_r") cfg.los_r = parse_double(key, value);
  else if (key == "los_theta") cfg.los_theta = parse_double(key, value);
  else if (key == "workers") cfg.workers = static_cast<int>(parse_long(key, value));
  else throw config_error("config: unknown key '" + key + "'");
}

SystemConfig load_config_file(const std::string& path, const SystemConfig& base) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot read '" + path + "'");
  SystemConfig cfg = base;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw config_error("config: line " + std::to_string(lineno) +
                         " is not 'key = value'");
    apply_config_value(cfg, trim(stripped.substr(0, eq)),
                       trim(stripped.substr(eq + 1)));
  }
  return cfg;
}

}  // namespace bbbc
