#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "bbbc/cli.hpp"
#include "bbbc/sweeps.hpp"

using namespace bbbc;

namespace {

SystemConfig tiny_config() {
  SystemConfig cfg;
  cfg.N = 16;
  cfg.N_zp = 4;
  cfg.M = 2;
  cfg.L_g = 2;
  cfg.D = 8;
  cfg.data_blocks = 2;
  cfg.realizations = 600;  // spans several scheduler chunks
  cfg.master_seed = 42;
  return cfg;
}

int run_cli(std::initializer_list<const char*> args) {
  std::vector<const char*> argv{"bbbc"};
  argv.insert(argv.end(), args);
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("config file parsing honors comments, overrides, and bad input") {
  const char* path = "/tmp/bbbc_test_config.cfg";
  {
    std::ofstream out(path);
    out << "# Table-like overrides\n";
    out << "N = 64\n";
    out << "M = 4   # four antennas\n";
    out << "L_g = 2\n";
    out << "sigma2 = 1e-12\n";
    out << "master_seed = 99\n";
  }
  const SystemConfig cfg = load_config_file(path);
  CHECK(cfg.N == 64);
  CHECK(cfg.M == 4);
  CHECK(cfg.L_g == 2);
  CHECK(cfg.sigma2 == 1e-12);
  CHECK(cfg.master_seed == 99);
  CHECK(cfg.delay_step() == 16);  // auto floor(N/M)
  cfg.validate();

  {
    std::ofstream out(path);
    out << "unknown_key = 3\n";
  }
  CHECK_THROWS_AS(load_config_file(path), config_error);
  {
    std::ofstream out(path);
    out << "N = twelve\n";
  }
  CHECK_THROWS_AS(load_config_file(path), config_error);
  CHECK_THROWS_AS(load_config_file("/nonexistent/nope.cfg"), config_error);
  std::remove(path);
}

TEST_CASE("config validation rejects broken invariants before any work") {
  SystemConfig cfg = tiny_config();
  cfg.D = 1;  // < L_g
  CHECK_THROWS_AS(cfg.validate(), config_error);
  CHECK_THROWS_AS(run_ber_sweep(cfg, {10.0}), config_error);

  cfg = tiny_config();
  cfg.M = 16;  // N < M L_g
  CHECK_THROWS_AS(cfg.validate(), config_error);

  cfg = tiny_config();
  cfg.N_zp = 2;  // == L_g
  CHECK_THROWS_AS(cfg.validate(), config_error);

  cfg = tiny_config();
  cfg.N_p = 1;
  CHECK_THROWS_AS(cfg.validate(), config_error);
}

TEST_CASE("average-SNR definition inverts to the Table-I transmit power") {
  SystemConfig cfg;  // defaults: d_f = 10 m, d_g = 100 m, sigma2 = 1e-13
  CHECK(cfg.beta1() == doctest::Approx(1e-5).epsilon(1e-12));
  CHECK(cfg.beta2() == doctest::Approx(1e-7).epsilon(1e-12));
  CHECK(cfg.p_t_for_snr_db(20.0) == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("snr grid parsing") {
  const auto grid = parse_snr_grid("0:5:40");
  CHECK(grid.size() == 9);
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == 40.0);
  CHECK(parse_snr_grid("20").size() == 1);
  CHECK_THROWS_AS(parse_snr_grid("0:-5:40"), std::invalid_argument);
  CHECK_THROWS_AS(parse_snr_grid("0:5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_snr_grid("abc"), std::invalid_argument);
}

TEST_CASE("CSV output is byte-identical for any worker count") {
  SystemConfig cfg = tiny_config();
  cfg.equalizer = "all";
  cfg.csi = "both";
  cfg.workers = 1;
  const std::string one = csv_string(run_ber_sweep(cfg, {5.0, 15.0}));
  cfg.workers = 3;
  const std::string three = csv_string(run_ber_sweep(cfg, {5.0, 15.0}));
  CHECK(one == three);

  cfg.workers = 4;
  const std::string outage4 = csv_string(run_outage_sweep(cfg, {0.0, 10.0}));
  cfg.workers = 1;
  CHECK(csv_string(run_outage_sweep(cfg, {0.0, 10.0})) == outage4);
}

TEST_CASE("ber sweep emits one sim row per (equalizer, csi, snr) plus theory") {
  SystemConfig cfg = tiny_config();
  cfg.equalizer = "all";
  cfg.csi = "both";
  cfg.realizations = 50;
  const SweepResult r = run_ber_sweep(cfg, {0.0, 10.0});
  int sim = 0, theory = 0;
  for (const auto& row : r.rows) {
    if (row.metric_name == "ber_sim") ++sim;
    if (row.metric_name == "ber_theory") ++theory;
  }
  CHECK(sim == 3 * 2 * 2);     // zf, mmse, bigdfe x perfect, estimated x 2 points
  CHECK(theory == 3 * 2);      // zf, mmse, mfb x 2 points
  // ci matches the binomial half-width over the bit count
  const SweepRow* row = r.find("ber_sim", "proposed", "mmse", "perfect", 0.0);
  REQUIRE(row != nullptr);
  const double bits = static_cast<double>(row->n_realizations) * cfg.data_blocks *
                      cfg.N * 2;
  CHECK(row->ci_halfwidth ==
        doctest::Approx(1.96 * std::sqrt(row->value * (1 - row->value) / bits))
            .epsilon(1e-12));
}

TEST_CASE("a 200 dB sweep point is error-free with perfect CSI") {
  SystemConfig cfg = tiny_config();
  cfg.equalizer = "all";
  cfg.csi = "perfect";
  cfg.realizations = 30;
  const SweepResult r = run_ber_sweep(cfg, {200.0});
  for (const char* eq : {"zf", "mmse", "bigdfe"}) {
    const SweepRow* row = r.find("ber_sim", "proposed", eq, "perfect", 200.0);
    REQUIRE(row != nullptr);
    CHECK(row->value == 0.0);
  }
}

TEST_CASE("outage sweep saturates to zero at huge power and tracks theory") {
  SystemConfig cfg = tiny_config();
  cfg.realizations = 20000;
  const SweepResult r = run_outage_sweep(cfg, {120.0});
  const SweepRow* mc = r.find("outage_mc", "", "", "", 120.0);
  const SweepRow* an = r.find("outage_analytic", "", "", "", 120.0);
  REQUIRE(mc != nullptr);
  REQUIRE(an != nullptr);
  CHECK(mc->value == 0.0);
  CHECK(an->value < 1e-6);

  // exact-regime point: M = 1 makes the analytic value exact
  SystemConfig one = tiny_config();
  one.M = 1;
  one.L_g = 4;
  one.N_zp = 6;
  one.D = 0;
  one.realizations = 40000;
  const SweepResult rx = run_outage_sweep(one, {10.0});
  const SweepRow* mc1 = rx.find("outage_mc", "", "", "", 10.0);
  const SweepRow* an1 = rx.find("outage_analytic", "", "", "", 10.0);
  REQUIRE(mc1 != nullptr);
  REQUIRE(an1 != nullptr);
  const double sigma =
      std::sqrt(an1->value * (1 - an1->value) / mc1->n_realizations);
  CHECK(std::fabs(mc1->value - an1->value) <= 3.0 * sigma);
}

TEST_CASE("pdf histogram mean matches the array size") {
  SystemConfig cfg = tiny_config();
  cfg.M = 8;
  cfg.L_g = 2;
  cfg.D = 2;
  const SweepResult r = run_pdf_histogram(cfg, 20000);
  double mean = 0.0, mass = 0.0, width = 0.0;
  for (const auto& row : r.rows) {
    if (row.metric_name != "pdf_empirical") continue;
    if (width == 0.0)
      width = 2.0 * row.snr_db;  // first bin center = width / 2
    mean += row.snr_db * row.value * width;
    mass += row.value * width;
  }
  CHECK(mass > 0.97);  // some mass can sit beyond the last bin
  CHECK(mean == doctest::Approx(8.0).epsilon(0.03));
}

TEST_CASE("csv carries metadata lines and the fixed header") {
  SystemConfig cfg = tiny_config();
  cfg.realizations = 10;
  const std::string csv = csv_string(run_outage_sweep(cfg, {10.0}));
  CHECK(csv.find("# N = 16\n") != std::string::npos);
  CHECK(csv.find("# master_seed = 42\n") != std::string::npos);
  CHECK(csv.find("experiment_id,scheme,equalizer,csi,M,Lg,snr_db,metric_name,"
                 "value,ci_halfwidth,n_realizations,seed\n") != std::string::npos);
}

TEST_CASE("different master seeds give different Monte Carlo outcomes") {
  SystemConfig cfg = tiny_config();
  cfg.realizations = 200;
  const SweepResult a = run_outage_sweep(cfg, {8.0});
  cfg.master_seed = 43;
  const SweepResult b = run_outage_sweep(cfg, {8.0});
  CHECK(a.rows[0].value != b.rows[0].value);
  CHECK(a.rows[0].seed != b.rows[0].seed);
}

TEST_CASE("benchmark sweep enforces the flat-fading precondition") {
  SystemConfig cfg = tiny_config();  // L_g = 2
  CHECK_THROWS_AS(run_benchmark_sweep(cfg, {20.0}), config_error);
  cfg.L_g = 1;
  cfg.D = 8;
  cfg.realizations = 100;
  const SweepResult r = run_benchmark_sweep(cfg, {20.0});
  for (const char* scheme : {"alamouti", "random", "direct"}) {
    CHECK(r.find("ber_sim", scheme, "", "", 20.0) != nullptr);
    CHECK(r.find("ber_theory", scheme, "", "", 20.0) != nullptr);
  }
}

TEST_CASE("cli exit codes: usage 1, config 2, io 3, selftest 0") {
  CHECK(run_cli({"selftest"}) == 0);
  CHECK(run_cli({"no-such-command"}) != 0);
  CHECK(run_cli({"ber", "--no-such-flag"}) != 0);
  CHECK(run_cli({"ber", "--config", "/nonexistent/x.cfg"}) == 2);
  CHECK(run_cli({"outage", "--M", "3", "--Lg", "9", "--realizations", "10"}) == 2);
  CHECK(run_cli({"outage", "--realizations", "5", "--M", "2", "--Lg", "2",
                 "--snr", "10", "--out", "/nonexistent_dir/x.csv"}) == 3);
}

TEST_CASE("cli writes a parseable csv") {
  const char* out_path = "/tmp/bbbc_cli_test.csv";
  CHECK(run_cli({"outage", "--realizations", "50", "--M", "2", "--Lg", "2",
                 "--snr", "10:5:15", "--seed", "7", "--out", out_path}) == 0);
  std::ifstream in(out_path);
  REQUIRE(in.good());
  std::string line;
  int data_rows = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    ++data_rows;
    CHECK(line.find("outage") == 0);
  }
  CHECK(data_rows == 4);  // mc + analytic rows at two points
  std::remove(out_path);
}
