#include "bbbc/sweeps.hpp"

#include <algorithm>
#include <atomic>
#include <optional>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <thread>

#include "bbbc/analysis.hpp"
#include "bbbc/benchmarks.hpp"
#include "bbbc/receiver.hpp"

namespace bbbc {

namespace {

constexpr long kChunk = 256;

// stream purposes within an experiment
enum : std::uint64_t {
  kStreamChannel = 0,
  kStreamPayload = 1,
  kStreamNoise = 2,
  kStreamBeam = 3,
};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

int effective_workers(const SystemConfig& cfg) {
  if (cfg.workers > 0) return cfg.workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// chunked deterministic runner: body(begin, end, partial&) fills the chunk's
// partial; partials are merged by the caller in chunk order
template <typename Partial, typename Body>
std::vector<Partial> run_chunked(long n_items, int workers, Body&& body) {
  const long n_chunks = (n_items + kChunk - 1) / kChunk;
  std::vector<Partial> partials(static_cast<std::size_t>(n_chunks));
  std::atomic<long> next{0};
  auto work = [&]() {
    for (;;) {
      const long c = next.fetch_add(1);
      if (c >= n_chunks) break;
      const long b = c * kChunk;
      const long e = std::min(n_items, b + kChunk);
      body(b, e, partials[static_cast<std::size_t>(c)]);
    }
  };
  if (workers <= 1 || n_chunks <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    const int n_threads = static_cast<int>(std::min<long>(workers, n_chunks));
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  return partials;
}

double binomial_ci(double p, double n_trials) {
  if (n_trials <= 0.0) return 0.0;
  return 1.96 * std::sqrt(std::max(0.0, p * (1.0 - p)) / n_trials);
}

void append_config_metadata(SweepResult& result, const SystemConfig& cfg) {
  auto add = [&result](const std::string& k, const std::string& v) {
    result.metadata.emplace_back(k, v);
  };
  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return std::string(buf);
  };
  add("N", std::to_string(cfg.N));
  add("N_zp", std::to_string(cfg.N_zp));
  add("N_p", std::to_string(cfg.N_p));
  add("sigma2", num(cfg.sigma2));
  add("modulation", cfg.modulation);
  add("M", std::to_string(cfg.M));
  add("D", std::to_string(cfg.delay_step()));
  add("L_g", std::to_string(cfg.L_g));
  add("d_d", num(cfg.d_d));
  add("d_f", num(cfg.d_f));
  add("d_g", num(cfg.d_g));
  add("v_d", num(cfg.v_d));
  add("v_f", num(cfg.v_f));
  add("v_g", num(cfg.v_g));
  add("regime", cfg.regime);
  add("equalizer", cfg.equalizer);
  add("csi", cfg.csi);
  add("R", num(cfg.R));
  add("bi_gdfe_iters", std::to_string(cfg.bi_gdfe_iters));
  add("mean_window_blocks", std::to_string(cfg.mean_window_blocks));
  add("realizations", std::to_string(cfg.realizations));
  add("master_seed", std::to_string(cfg.master_seed));
  add("data_blocks", std::to_string(cfg.data_blocks));
  add("zc_root", std::to_string(cfg.zc_root));
  add("los_r", num(cfg.los_r));
  add("los_theta", num(cfg.los_theta));
}

}  // namespace

const SweepRow* SweepResult::find(const std::string& metric,
                                  const std::string& scheme,
                                  const std::string& equalizer,
                                  const std::string& csi, double snr_db) const {
  for (const auto& r : rows) {
    if (!metric.empty() && r.metric_name != metric) continue;
    if (!scheme.empty() && r.scheme != scheme) continue;
    if (!equalizer.empty() && r.equalizer != equalizer) continue;
    if (!csi.empty() && r.csi != csi) continue;
    if (std::fabs(r.snr_db - snr_db) > 1e-9) continue;
    return &r;
  }
  return nullptr;
}

std::vector<double> parse_snr_grid(const std::string& text) {
  std::vector<double> parts;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ':')) {
    std::size_t pos = 0;
    parts.push_back(std::stod(token, &pos));
    if (pos != token.size()) throw std::invalid_argument("bad SNR grid: " + text);
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3) throw std::invalid_argument("SNR grid must be start:step:stop");
  const double start = parts[0], step = parts[1], stop = parts[2];
  if (!(step > 0.0) || stop < start)
    throw std::invalid_argument("SNR grid must be increasing with positive step");
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    const double v = start + step * i;
    if (v > stop + 1e-9) break;
    grid.push_back(v);
  }
  return grid;
}

// ---------------------------------------------------------------------------
// BER sweep

namespace {

struct BerVariant {
  std::string equalizer;  // zf | mmse | bigdfe
  std::string csi;        // perfect | estimated
};

std::vector<BerVariant> select_variants(const SystemConfig& cfg) {
  std::vector<std::string> eqs;
  if (cfg.equalizer == "all")
    eqs = {"zf", "mmse", "bigdfe"};
  else if (cfg.equalizer != "mfb")
    eqs = {cfg.equalizer};
  std::vector<std::string> csis;
  if (cfg.csi == "both")
    csis = {"perfect", "estimated"};
  else
    csis = {cfg.csi};
  std::vector<BerVariant> out;
  for (const auto& e : eqs)
    for (const auto& c : csis) out.push_back({e, c});
  return out;
}

struct TheoryAcc {
  double sum = 0.0;
  double sum_sq = 0.0;
  void add(double v) {
    sum += v;
    sum_sq += v * v;
  }
  void merge(const TheoryAcc& o) {
    sum += o.sum;
    sum_sq += o.sum_sq;
  }
};

struct BerPartial {
  std::vector<std::uint64_t> errors;  // per variant
  TheoryAcc zf, mmse, mfb;
  long count = 0;
};

Frame assemble_frame(const cvec& pilot, const BitVec& payload, int n,
                     const ModulationAlphabet& alphabet) {
  Frame frame;
  frame.payload_bits = payload;
  cvec pilot_neg(pilot.size());
  for (std::size_t i = 0; i < pilot.size(); ++i) pilot_neg[i] = -pilot[i];
  frame.pilot_blocks = {pilot, std::move(pilot_neg)};
  const std::size_t bits_per_block =
      static_cast<std::size_t>(n) * alphabet.bits_per_symbol;
  for (std::size_t off = 0; off < payload.size(); off += bits_per_block) {
    BitVec chunk(payload.begin() + static_cast<std::ptrdiff_t>(off),
                 payload.begin() + static_cast<std::ptrdiff_t>(off + bits_per_block));
    frame.data_blocks.push_back(modulate(chunk, alphabet));
  }
  return frame;
}

std::uint64_t count_bit_errors(const BitVec& a, const BitVec& b,
                               std::size_t offset) {
  std::uint64_t e = 0;
  for (std::size_t i = 0; i < a.size(); ++i) e += a[i] != b[offset + i];
  return e;
}

}  // namespace

SweepResult run_ber_sweep(const SystemConfig& cfg,
                          const std::vector<double>& snr_grid_db,
                          const std::string& experiment_id) {
  cfg.validate();
  if (cfg.data_blocks < 1)
    throw config_error("ber sweep needs data_blocks >= 1");
  const ModulationAlphabet alphabet = cfg.alphabet();
  const ChannelParams params = cfg.channel_params();
  const cvec pilot = generate_pilot_block(cfg.N, alphabet, cfg.zc_root);
  const std::vector<BerVariant> variants = select_variants(cfg);
  const bool want_estimated =
      std::any_of(variants.begin(), variants.end(),
                  [](const BerVariant& v) { return v.csi == "estimated"; });
  std::optional<LsEstimator> estimator;
  if (want_estimated) estimator.emplace(pilot, params);
  const bool want_zf_theory = cfg.equalizer == "all" || cfg.equalizer == "zf";
  const bool want_mmse_theory = cfg.equalizer == "all" || cfg.equalizer == "mmse";
  const bool want_mfb = cfg.equalizer == "all" || cfg.equalizer == "mfb";
  const std::uint64_t exp_hash = fnv1a(experiment_id);
  const cvec alpha = ola_noise_profile(cfg.N, cfg.L_g);
  const std::size_t bits_per_block =
      static_cast<std::size_t>(cfg.N) * alphabet.bits_per_symbol;
  const std::size_t payload_bits = bits_per_block * cfg.data_blocks;
  const int workers = effective_workers(cfg);

  SweepResult result;
  append_config_metadata(result, cfg);
  result.metadata.emplace_back("experiment", experiment_id);

  for (std::size_t point = 0; point < snr_grid_db.size(); ++point) {
    const double snr_db = snr_grid_db[point];
    const double p_t = cfg.p_t_for_snr_db(snr_db);
    const double gbar = gamma_bar(p_t, cfg.sigma2, cfg.N, cfg.L_g);

    auto body = [&](long begin, long end, BerPartial& part) {
      part.errors.assign(variants.size(), 0);
      BitVec payload(payload_bits);
      for (long r = begin; r < end; ++r) {
        RngStream ch_rng(cfg.master_seed,
                         {exp_hash, kStreamChannel, point, static_cast<std::uint64_t>(r)});
        RngStream payload_rng(cfg.master_seed,
                              {exp_hash, kStreamPayload, point, static_cast<std::uint64_t>(r)});
        RngStream noise_rng(cfg.master_seed,
                            {exp_hash, kStreamNoise, point, static_cast<std::uint64_t>(r)});
        const ChannelRealization ch = sample_channels(params, ch_rng);
        for (auto& b : payload)
          b = static_cast<std::uint8_t>(payload_rng.next_u64() & 1u);
        const Frame frame = assemble_frame(pilot, payload, cfg.N, alphabet);
        const cvec rx = propagate(frame, ch, params, p_t, cfg.sigma2, noise_rng);

        const std::size_t n_c = static_cast<std::size_t>(cfg.N + cfg.N_zp);
        const std::size_t window =
            cfg.mean_window_blocks > 0
                ? std::min(rx.size(), n_c * static_cast<std::size_t>(cfg.mean_window_blocks))
                : rx.size();
        const cplx z_bar =
            estimate_direct_mean(std::span<const cplx>(rx.data(), window));
        const cvec z_hat = suppress_direct(rx, z_bar);

        std::vector<OlaBlock> ola;
        ola.reserve(frame.block_count());
        for (std::size_t b = 0; b < frame.block_count(); ++b) {
          cvec blk(z_hat.begin() + static_cast<std::ptrdiff_t>(b * n_c),
                   z_hat.begin() + static_cast<std::ptrdiff_t>((b + 1) * n_c));
          ola.push_back(overlap_add(blk, cfg.N, cfg.L_g));
        }

        const cvec lambda_true = freq_response(ch.h_eq);
        const cplx dhd_true = ch.direct_gain - z_bar / std::sqrt(p_t);
        cvec lambda_est;
        cplx dhd_est(0.0, 0.0);
        if (want_estimated) {
          const ChannelEstimate est = estimator->estimate(ola[0], ola[1], p_t);
          lambda_est = freq_response(est.h_eq_est);
          dhd_est = est.delta_hd_est;
        }

        for (std::size_t b = 0; b < frame.data_blocks.size(); ++b) {
          const OlaBlock& blk = ola[b + 2];
          cvec yf_perfect, yf_est;
          for (std::size_t v = 0; v < variants.size(); ++v) {
            const bool est_csi = variants[v].csi == "estimated";
            cvec& yf = est_csi ? yf_est : yf_perfect;
            if (yf.empty())
              yf = to_frequency_domain(blk.y, est_csi ? dhd_est : dhd_true, p_t, alpha);
            const cvec& lam = est_csi ? lambda_est : lambda_true;
            try {
              EqualizerOutput out;
              if (variants[v].equalizer == "zf")
                out = equalize_zf(yf, lam, gbar, alphabet);
              else if (variants[v].equalizer == "mmse")
                out = equalize_mmse(yf, lam, gbar, alphabet);
              else
                out = bi_gdfe(yf, lam, gbar, cfg.bi_gdfe_iters, alphabet);
              const BitVec bits = demodulate(out.soft_symbols, alphabet);
              part.errors[v] += count_bit_errors(bits, payload, b * bits_per_block);
            } catch (const singular_channel_error&) {
              // an all-but-dead bin defeats ZF; score the block as undecidable
              part.errors[v] += bits_per_block / 2;
            }
          }
        }

        if (want_zf_theory || want_mmse_theory) {
          double inv_sum = 0.0, mmse_mean = 0.0;
          bool zero_bin = false;
          for (const auto& l : lambda_true) {
            const double l2 = std::norm(l);
            if (l2 == 0.0) zero_bin = true;
            else inv_sum += 1.0 / l2;
            mmse_mean += 1.0 / (1.0 + gbar * l2);
          }
          if (want_zf_theory) {
            const double g_zf =
                zero_bin ? 0.0 : gbar * static_cast<double>(cfg.N) / inv_sum;
            part.zf.add(theoretical_ber(g_zf));
          }
          if (want_mmse_theory) {
            const double g_mmse =
                1.0 / (mmse_mean / static_cast<double>(cfg.N)) - 1.0;
            part.mmse.add(theoretical_ber(std::max(0.0, g_mmse)));
          }
        }
        if (want_mfb)
          part.mfb.add(theoretical_ber(
              mfb_snr(ch, p_t, cfg.sigma2, cfg.delta_gamma())));
        ++part.count;
      }
    };

    const auto partials = run_chunked<BerPartial>(cfg.realizations, workers, body);
    std::vector<std::uint64_t> errors(variants.size(), 0);
    TheoryAcc zf_t, mmse_t, mfb_t;
    long count = 0;
    for (const auto& p : partials) {
      for (std::size_t v = 0; v < variants.size(); ++v) errors[v] += p.errors[v];
      zf_t.merge(p.zf);
      mmse_t.merge(p.mmse);
      mfb_t.merge(p.mfb);
      count += p.count;
    }
    const double total_bits =
        static_cast<double>(count) * static_cast<double>(payload_bits);

    for (std::size_t v = 0; v < variants.size(); ++v) {
      SweepRow row;
      row.experiment_id = experiment_id;
      row.scheme = "proposed";
      row.equalizer = variants[v].equalizer;
      row.csi = variants[v].csi;
      row.M = cfg.M;
      row.Lg = cfg.L_g;
      row.snr_db = snr_db;
      row.metric_name = "ber_sim";
      row.value = static_cast<double>(errors[v]) / total_bits;
      row.ci_halfwidth = binomial_ci(row.value, total_bits);
      row.n_realizations = count;
      row.seed = cfg.master_seed;
      result.rows.push_back(std::move(row));
    }
    auto add_theory = [&](const char* eq, const TheoryAcc& acc) {
      SweepRow row;
      row.experiment_id = experiment_id;
      row.scheme = "proposed";
      row.equalizer = eq;
      row.csi = "perfect";
      row.M = cfg.M;
      row.Lg = cfg.L_g;
      row.snr_db = snr_db;
      row.metric_name = "ber_theory";
      const double n = static_cast<double>(count);
      row.value = acc.sum / n;
      const double var = std::max(0.0, acc.sum_sq / n - row.value * row.value);
      row.ci_halfwidth = 1.96 * std::sqrt(var / n);
      row.n_realizations = count;
      row.seed = cfg.master_seed;
      result.rows.push_back(std::move(row));
    };
    if (want_zf_theory) add_theory("zf", zf_t);
    if (want_mmse_theory) add_theory("mmse", mmse_t);
    if (want_mfb) add_theory("mfb", mfb_t);
  }
  return result;
}

// ---------------------------------------------------------------------------
// outage sweep

SweepResult run_outage_sweep(const SystemConfig& cfg,
                             const std::vector<double>& snr_grid_db,
                             const std::string& experiment_id) {
  cfg.validate();
  const ChannelParams params = cfg.channel_params();
  const std::uint64_t exp_hash = fnv1a(experiment_id);
  const int workers = effective_workers(cfg);
  const double dg = cfg.delta_gamma();

  SweepResult result;
  append_config_metadata(result, cfg);
  result.metadata.emplace_back("experiment", experiment_id);

  GKParams gk{};
  if (cfg.regime == "general")
    gk = gk_sum_params(cfg.M, cfg.L_g, cfg.beta1() * cfg.beta2());

  for (std::size_t point = 0; point < snr_grid_db.size(); ++point) {
    const double snr_db = snr_grid_db[point];
    const double p_t = cfg.p_t_for_snr_db(snr_db);
    const OutageQuery query{p_t, cfg.sigma2, cfg.R, dg};
    const double threshold = query.a1() / p_t;

    struct Partial {
      std::uint64_t outages = 0;
      long count = 0;
    };
    auto body = [&](long begin, long end, Partial& part) {
      for (long r = begin; r < end; ++r) {
        RngStream rng(cfg.master_seed,
                      {exp_hash, kStreamChannel, point, static_cast<std::uint64_t>(r)});
        if (sample_cascaded_gain(params, rng) < threshold) ++part.outages;
        ++part.count;
      }
    };
    const auto partials = run_chunked<Partial>(cfg.realizations, workers, body);
    std::uint64_t outages = 0;
    long count = 0;
    for (const auto& p : partials) {
      outages += p.outages;
      count += p.count;
    }

    SweepRow mc;
    mc.experiment_id = experiment_id;
    mc.scheme = "proposed";
    mc.equalizer = "mfb";
    mc.csi = "perfect";
    mc.M = cfg.M;
    mc.Lg = cfg.L_g;
    mc.snr_db = snr_db;
    mc.metric_name = "outage_mc";
    mc.value = static_cast<double>(outages) / static_cast<double>(count);
    mc.ci_halfwidth = binomial_ci(mc.value, static_cast<double>(count));
    mc.n_realizations = count;
    mc.seed = cfg.master_seed;
    result.rows.push_back(mc);

    SweepRow an = mc;
    an.metric_name = "outage_analytic";
    an.value = cfg.regime == "general"
                   ? outage_general(query, gk)
                   : outage_special(query, cfg.M, cfg.L_g, cfg.beta1(), cfg.beta2());
    an.ci_halfwidth = 0.0;
    result.rows.push_back(std::move(an));
  }
  return result;
}

// ---------------------------------------------------------------------------
// pdf histogram

SweepResult run_pdf_histogram(const SystemConfig& cfg, long n_draws,
                              const std::string& experiment_id) {
  cfg.validate();
  if (n_draws < 10000)
    throw config_error("pdf histogram needs n_draws >= 10^4");
  ChannelParams params = cfg.channel_params();
  params.beta_forward = 1.0;  // paper normalizes both links for this figure
  params.beta_backward = 1.0;
  const GKParams gk = gk_sum_params(cfg.M, cfg.L_g, 1.0);
  const double variance = gk.omega * gk.omega * (gk.k + gk.m + 1.0) / (gk.k * gk.m);
  const double x_max = gk.omega + 6.0 * std::sqrt(variance);
  const int n_bins = 60;
  const double width = x_max / n_bins;
  const std::uint64_t exp_hash = fnv1a(experiment_id);
  const int workers = effective_workers(cfg);

  struct Partial {
    std::vector<std::uint64_t> counts;
  };
  auto body = [&](long begin, long end, Partial& part) {
    part.counts.assign(n_bins, 0);
    for (long r = begin; r < end; ++r) {
      RngStream rng(cfg.master_seed,
                    {exp_hash, kStreamChannel, 0, static_cast<std::uint64_t>(r)});
      const double gain = sample_cascaded_gain(params, rng);
      const long bin = static_cast<long>(gain / width);
      if (bin >= 0 && bin < n_bins) ++part.counts[static_cast<std::size_t>(bin)];
    }
  };
  const auto partials = run_chunked<Partial>(n_draws, workers, body);
  std::vector<std::uint64_t> counts(n_bins, 0);
  for (const auto& p : partials)
    for (int b = 0; b < n_bins; ++b) counts[b] += p.counts[b];

  SweepResult result;
  append_config_metadata(result, cfg);
  result.metadata.emplace_back("experiment", experiment_id);
  result.metadata.emplace_back("pdf_bin_width", std::to_string(width));
  for (int b = 0; b < n_bins; ++b) {
    const double center = (b + 0.5) * width;
    const double p = static_cast<double>(counts[b]) / static_cast<double>(n_draws);
    SweepRow emp;
    emp.experiment_id = experiment_id;
    emp.scheme = "proposed";
    emp.equalizer = "-";
    emp.csi = "-";
    emp.M = cfg.M;
    emp.Lg = cfg.L_g;
    emp.snr_db = center;
    emp.metric_name = "pdf_empirical";
    emp.value = p / width;
    emp.ci_halfwidth = binomial_ci(p, static_cast<double>(n_draws)) / width;
    emp.n_realizations = n_draws;
    emp.seed = cfg.master_seed;
    result.rows.push_back(emp);

    SweepRow th = emp;
    th.metric_name = "pdf_theory";
    th.value = gk_pdf(center, gk);
    th.ci_halfwidth = 0.0;
    result.rows.push_back(std::move(th));
  }
  return result;
}

// ---------------------------------------------------------------------------
// benchmark sweep

SweepResult run_benchmark_sweep(const SystemConfig& cfg,
                                const std::vector<double>& snr_grid_db,
                                const std::string& experiment_id) {
  cfg.validate();
  if (cfg.L_g != 1)
    throw config_error("benchmark schemes require a flat backward link (L_g = 1)");
  if (cfg.M % 2 != 0)
    throw config_error("Alamouti grouping requires even M");
  const ModulationAlphabet alphabet = cfg.alphabet();
  const ChannelParams params = cfg.channel_params();
  const std::uint64_t exp_hash = fnv1a(experiment_id);
  const int workers = effective_workers(cfg);
  const std::size_t n_symbols =
      static_cast<std::size_t>(cfg.data_blocks) * static_cast<std::size_t>(cfg.N);
  const std::size_t bits_per_real = n_symbols * alphabet.bits_per_symbol;
  const char* scheme_names[3] = {"alamouti", "random", "direct"};

  SweepResult result;
  append_config_metadata(result, cfg);
  result.metadata.emplace_back("experiment", experiment_id);

  for (std::size_t point = 0; point < snr_grid_db.size(); ++point) {
    const double snr_db = snr_grid_db[point];
    const double p_t = cfg.p_t_for_snr_db(snr_db);
    const double amp = std::sqrt(p_t);

    struct Partial {
      std::uint64_t errors[3] = {0, 0, 0};
      TheoryAcc theory[3];
      long count = 0;
    };
    auto body = [&](long begin, long end, Partial& part) {
      std::vector<std::size_t> symbol_idx(n_symbols);
      cvec rx(n_symbols);
      auto bit_diff = [&alphabet](std::size_t sent_idx, std::size_t got_idx) {
        unsigned diff = alphabet.bits_of_index(static_cast<unsigned>(sent_idx)) ^
                        alphabet.bits_of_index(static_cast<unsigned>(got_idx));
        std::uint64_t e = 0;
        while (diff) {
          e += diff & 1u;
          diff >>= 1;
        }
        return e;
      };
      for (long r = begin; r < end; ++r) {
        RngStream ch_rng(cfg.master_seed,
                         {exp_hash, kStreamChannel, point, static_cast<std::uint64_t>(r)});
        RngStream sym_rng(cfg.master_seed,
                          {exp_hash, kStreamPayload, point, static_cast<std::uint64_t>(r)});
        RngStream beam_rng(cfg.master_seed,
                           {exp_hash, kStreamBeam, point, static_cast<std::uint64_t>(r)});
        const ChannelRealization ch = sample_channels(params, ch_rng);
        for (auto& s : symbol_idx)
          s = static_cast<std::size_t>(sym_rng.next_u64() % alphabet.size());

        const auto h_pair = alamouti_group_channels(ch);
        const BenchmarkScheme random_scheme =
            BenchmarkScheme::random_beam(cfg.M, beam_rng);
        const cplx h_random = effective_scalar_channel(random_scheme, ch);
        const cplx h_direct =
            effective_scalar_channel(BenchmarkScheme::direct(cfg.M), ch);

        for (int s = 0; s < 3; ++s) {
          RngStream noise_rng(cfg.master_seed,
                              {exp_hash, kStreamNoise, point,
                               static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(s)});
          std::uint64_t errs = 0;
          if (s == 0) {
            // pairs of symbols across two slots with the same channel
            for (std::size_t i = 0; i + 1 < n_symbols; i += 2) {
              const cplx s1 = alphabet.points[symbol_idx[i]];
              const cplx s2 = alphabet.points[symbol_idx[i + 1]];
              const cplx r1 = amp * (h_pair[0] * s1 + h_pair[1] * s2) +
                              noise_rng.next_cscg(cfg.sigma2);
              const cplx r2 =
                  amp * (-h_pair[0] * std::conj(s2) + h_pair[1] * std::conj(s1)) +
                  noise_rng.next_cscg(cfg.sigma2);
              const auto dec = alamouti_detect({r1, r2}, h_pair, p_t, alphabet);
              errs += bit_diff(symbol_idx[i], nearest_point(dec[0], alphabet));
              errs += bit_diff(symbol_idx[i + 1], nearest_point(dec[1], alphabet));
            }
            const double snr_pair =
                p_t * (std::norm(h_pair[0]) + std::norm(h_pair[1])) / cfg.sigma2;
            part.theory[s].add(theoretical_ber(snr_pair));
          } else {
            const cplx h_eff = s == 1 ? h_random : h_direct;
            for (std::size_t i = 0; i < n_symbols; ++i)
              rx[i] = amp * h_eff * alphabet.points[symbol_idx[i]] +
                      noise_rng.next_cscg(cfg.sigma2);
            const cvec dec = scalar_ml_detect(rx, h_eff, p_t, alphabet);
            for (std::size_t i = 0; i < n_symbols; ++i)
              errs += bit_diff(symbol_idx[i], nearest_point(dec[i], alphabet));
            part.theory[s].add(
                theoretical_ber(p_t * std::norm(h_eff) / cfg.sigma2));
          }
          part.errors[s] += errs;
        }
        ++part.count;
      }
    };
    const auto partials = run_chunked<Partial>(cfg.realizations, workers, body);
    Partial total;
    for (const auto& p : partials) {
      for (int s = 0; s < 3; ++s) {
        total.errors[s] += p.errors[s];
        total.theory[s].merge(p.theory[s]);
      }
      total.count += p.count;
    }
    const double total_bits =
        static_cast<double>(total.count) * static_cast<double>(bits_per_real);

    for (int s = 0; s < 3; ++s) {
      SweepRow sim;
      sim.experiment_id = experiment_id;
      sim.scheme = scheme_names[s];
      sim.equalizer = "ml";
      sim.csi = "perfect";
      sim.M = cfg.M;
      sim.Lg = cfg.L_g;
      sim.snr_db = snr_db;
      sim.metric_name = "ber_sim";
      sim.value = static_cast<double>(total.errors[s]) / total_bits;
      sim.ci_halfwidth = binomial_ci(sim.value, total_bits);
      sim.n_realizations = total.count;
      sim.seed = cfg.master_seed;
      result.rows.push_back(sim);

      SweepRow th = sim;
      th.metric_name = "ber_theory";
      const double n = static_cast<double>(total.count);
      th.value = total.theory[s].sum / n;
      const double var =
          std::max(0.0, total.theory[s].sum_sq / n - th.value * th.value);
      th.ci_halfwidth = 1.96 * std::sqrt(var / n);
      result.rows.push_back(std::move(th));
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// CSV

void write_csv(const SweepResult& result, std::ostream& out) {
  for (const auto& [k, v] : result.metadata) out << "# " << k << " = " << v << "\n";
  out << "experiment_id,scheme,equalizer,csi,M,Lg,snr_db,metric_name,value,"
         "ci_halfwidth,n_realizations,seed\n";
  char buf[160];
  for (const auto& r : result.rows) {
    std::snprintf(buf, sizeof(buf), "%.4f,%.10e,%.3e,%ld,%llu", r.snr_db, r.value,
                  r.ci_halfwidth, r.n_realizations,
                  static_cast<unsigned long long>(r.seed));
    out << r.experiment_id << ',' << r.scheme << ',' << r.equalizer << ','
        << r.csi << ',' << r.M << ',' << r.Lg << ',' << buf << '\n';
  }
}

std::string csv_string(const SweepResult& result) {
  std::ostringstream out;
  write_csv(result, out);
  return out.str();
}

}  // namespace bbbc
