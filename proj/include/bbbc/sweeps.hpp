// sweeps.hpp - seeded Monte Carlo experiments and CSV emission
//
// Realizations are partitioned into fixed-size chunks claimed by workers;
// every realization derives its random streams from (master_seed,
// experiment hash, point index, realization index), and partial results are
// merged in chunk order, so the CSV output is byte-identical for any worker
// count. Error counts are summed as integers before division.
//
// CSV: `#`-prefixed metadata lines with the effective configuration, then a
// fixed header row. For pdf histograms the snr_db column carries the bin
// center. ci_halfwidth is the normal-approximation binomial half-width over
// the effective trial count (bits for BER rows, realizations for outage).

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "bbbc/config.hpp"

namespace bbbc {

struct SweepRow {
  std::string experiment_id;
  std::string scheme;     // proposed | alamouti | random | direct
  std::string equalizer;  // zf | mmse | bigdfe | mfb | -
  std::string csi;        // perfect | estimated | -
  int M = 0;
  int Lg = 0;
  double snr_db = 0.0;
  std::string metric_name;  // ber_sim | ber_theory | outage_mc | outage_analytic
                            // | pdf_empirical | pdf_theory
  double value = 0.0;
  double ci_halfwidth = 0.0;
  long n_realizations = 0;
  std::uint64_t seed = 0;
};

struct SweepResult {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<SweepRow> rows;

  // first row matching the predicate fields ("" matches anything)
  const SweepRow* find(const std::string& metric, const std::string& scheme,
                       const std::string& equalizer, const std::string& csi,
                       double snr_db) const;
};

// "start:step:stop" (inclusive) or a single value
std::vector<double> parse_snr_grid(const std::string& text);

// BER vs average SNR for the configured equalizer/csi selections, with
// per-realization-averaged theory curves for ZF, MMSE and the MFB
SweepResult run_ber_sweep(const SystemConfig& cfg,
                          const std::vector<double>& snr_grid_db,
                          const std::string& experiment_id = "ber");

// Monte Carlo outage of the MFB SNR against the target rate, next to the
// analytical curve for the configured regime
SweepResult run_outage_sweep(const SystemConfig& cfg,
                             const std::vector<double>& snr_grid_db,
                             const std::string& experiment_id = "outage");

// histogram of the normalized equivalent channel gain (path loss set to 1)
// with the matched generalized-K density on the same grid
SweepResult run_pdf_histogram(const SystemConfig& cfg, long n_draws,
                              const std::string& experiment_id = "pdf");

// CSI-free baselines (Alamouti / random beam / direct), bit-level BER plus
// per-realization-averaged theory; requires L_g = 1
SweepResult run_benchmark_sweep(const SystemConfig& cfg,
                                const std::vector<double>& snr_grid_db,
                                const std::string& experiment_id = "bench");

void write_csv(const SweepResult& result, std::ostream& out);
std::string csv_string(const SweepResult& result);

}  // namespace bbbc
