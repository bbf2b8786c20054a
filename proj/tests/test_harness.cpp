#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "fhqr/error.hpp"
#include "fhqr/harness.hpp"
#include "support.hpp"

using namespace fhqr;

namespace {

SimConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, desk_config());
}

std::string csv_of(const SimConfig& cfg, std::size_t workers) {
  std::ostringstream out;
  write_csv(run_sweep(cfg, workers), out);
  return out.str();
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("ZF equalizer: passthrough, exact inversion, noise term") {
  std::mt19937_64 rng(61);
  IQMatrix h(3, 4);
  for (std::size_t f = 0; f < 3; ++f) h(f, 0) = 1.0;
  const IQMatrix y = testing::random_matrix(3, 4, rng);
  const auto s1 = equalize_zf(y, h);
  for (std::size_t f = 0; f < 3; ++f) CHECK(std::abs(s1[f] - y(f, 0)) < 1e-15);

  const IQMatrix hr = testing::random_matrix(5, 8, rng);
  const IQMatrix w = testing::random_matrix(5, 8, rng);
  std::vector<cplx> s(5);
  IQMatrix clean(5, 8), noisy(5, 8);
  std::normal_distribution<double> n(0.0, 1.0);
  for (std::size_t f = 0; f < 5; ++f) {
    s[f] = cplx(n(rng), n(rng));
    for (std::size_t r = 0; r < 8; ++r) {
      clean(f, r) = hr(f, r) * s[f];
      noisy(f, r) = clean(f, r) + w(f, r);
    }
  }
  const auto exact = equalize_zf(clean, hr);
  const auto est = equalize_zf(noisy, hr);
  for (std::size_t f = 0; f < 5; ++f) {
    CHECK(std::abs(exact[f] - s[f]) < 1e-12);
    cplx hw{};
    double hh = 0.0;
    for (std::size_t r = 0; r < 8; ++r) {
      hw += std::conj(hr(f, r)) * w(f, r);
      hh += std::norm(hr(f, r));
    }
    CHECK(std::abs((est[f] - s[f]) - hw / hh) < 1e-12);
  }

  IQMatrix dead = hr;
  for (std::size_t r = 0; r < 8; ++r) dead(2, r) = 0.0;
  try {
    equalize_zf(noisy, dead);
    FAIL("expected EqualizationError");
  } catch (const EqualizationError& e) {
    CHECK(e.subcarrier() == 2);
  }
}

TEST_CASE("Wilson interval") {
  const Interval zero = wilson_interval(0, 100);
  CHECK(zero.low == doctest::Approx(0.0));
  CHECK(zero.high == doctest::Approx(3.8415 / 103.8415).epsilon(1e-3));
  const Interval half = wilson_interval(50, 100);
  CHECK(half.low == doctest::Approx(0.4038).epsilon(1e-3));
  CHECK(half.high == doctest::Approx(0.5962).epsilon(1e-3));
  // Four times the samples roughly halves the width.
  const Interval big = wilson_interval(200, 400);
  CHECK((big.high - big.low) / (half.high - half.low) == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("config parsing") {
  const SimConfig c = parse("snr_db = 0:5:20\ntrials = 3\nl_u = 2*rank\ncompressor = qr\nusers = 3\n");
  CHECK(c.snr_db == std::vector<double>{0, 5, 10, 15, 20});
  CHECK(c.l_u.rank_multiple == 2);
  CHECK(c.rb_counts == std::vector<std::size_t>{8, 8, 8});
  CHECK_THROWS_AS(parse("antennas = 4\n"), ConfigError);
  CHECK_THROWS_AS(parse("trials = 1\ntrials = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse("trials = many\n"), ConfigError);
  CHECK_THROWS_AS(parse("trials = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse("delay_scale = 8\n"), ConfigError);
  CHECK_THROWS_AS(parse("compressor = zip\n"), ConfigError);
  CHECK_THROWS_AS(parse("rb_allocation = 20, 20\n"), InvalidInput);
  CHECK_THROWS_AS(parse("just text\n"), ConfigError);

  std::istringstream full("users = 12\nrb_allocation = reference\n");
  const SimConfig t = parse_config(full, table1_config());
  CHECK(t.rb_counts == reference_rb_counts(12));
  CHECK(t.grid.symbol_length() == 4384);
}

TEST_CASE("scenario derives ranks and budgets") {
  const Scenario s = Scenario::build(desk_config());
  CHECK(s.channel_rank == 11);
  CHECK(s.l_u == std::vector<std::size_t>{11, 11, 11, 11});
  CHECK(s.svd_rank == 44);
  CHECK(s.svd_target_bits == s.qr_report.b_cmp + s.qr_report.b_ovh);
  CHECK(s.report_for(Compressor::kSvd).b_cmp <= s.svd_target_bits);
  CHECK(s.report_for(Compressor::kNone).cr == 1.0);

  SimConfig full = table1_config();
  full.compressors = {Compressor::kQr, Compressor::kSvd};
  const Scenario t = Scenario::build(full);
  CHECK(t.svd_rank == 88);
  CHECK(t.qr_report.cr == doctest::Approx(8.926).epsilon(1e-3));
}

TEST_CASE("noiseless chain is error free") {
  SimConfig cfg = parse("compressor = none, qr\nrb_allocation = 20\nusers = 1\n");
  const Scenario s = Scenario::build(cfg);
  for (std::uint64_t t = 0; t < 10; ++t) {
    const TrialResult r = run_trial(s, 60.0, derive_seed(3, t));
    for (const auto& o : r.outcomes)
      for (const auto& u : o.users) CHECK(u.tx == u.rx);
  }
}

TEST_CASE("QR with L_u = N_r tracks the uncompressed chain") {
  SimConfig cfg = parse("compressor = qr, none\nl_u = 64\nsnr_db = -4, 0\ntrials = 6\ntiming = false\n");
  const SweepResult r = run_sweep(cfg, 1);
  for (std::size_t i = 0; i < r.rows.size(); i += 2) {
    const double qr = r.rows[i].ber;
    const double none = r.rows[i + 1].ber;
    CHECK(std::abs(qr - none) <= 3.0 * std::sqrt(none * (1 - none) / double(r.rows[i].tx_bits)) + 1e-12);
  }
}

TEST_CASE("sweep output is reproducible and independent of worker count") {
  const SimConfig cfg = parse("snr_db = 0, 6\ntrials = 3\ntiming = false\n");
  const std::string a = csv_of(cfg, 1);
  CHECK(a == csv_of(cfg, 1));
  CHECK(a == csv_of(cfg, 3));
  CHECK(a.rfind("snr_db,compressor,l_u,trials,tx_bits,bit_errors,ber,ber_ci_low,ber_ci_high,cr,b_org,b_cmp,b_ovh,"
                "median_compress_us\n", 0) == 0);
}

TEST_CASE("one-trial sweep equals the trial itself") {
  const SimConfig cfg = parse("snr_db = -2\ntrials = 1\ncompressor = qr, none\ntiming = false\n");
  const SweepResult sweep = run_sweep(cfg, 1);
  const TrialResult trial = run_trial(Scenario::build(cfg), -2.0, derive_seed(cfg.seed, 0));
  REQUIRE(sweep.rows.size() == trial.outcomes.size());
  for (std::size_t c = 0; c < trial.outcomes.size(); ++c) {
    std::uint64_t errors = 0, bits = 0;
    for (std::size_t u = 0; u < trial.outcomes[c].users.size(); ++u) {
      const auto& ub = trial.outcomes[c].users[u];
      REQUIRE(ub.tx.size() == ub.rx.size());
      std::uint64_t e = 0;
      for (std::size_t i = 0; i < ub.tx.size(); ++i) e += ub.tx[i] != ub.rx[i];
      CHECK(sweep.rows[c].user_bit_errors[u] == e);
      errors += e;
      bits += ub.tx.size();
    }
    CHECK(sweep.rows[c].bit_errors == errors);
    CHECK(sweep.rows[c].tx_bits == bits);
    CHECK(sweep.rows[c].ber >= 0.0);
    CHECK(sweep.rows[c].ber <= 1.0);
  }
}

TEST_CASE("64-QAM over AWGN matches the closed-form approximation at 15-25 dB") {
  const double targets[] = {15.0, 20.0, 25.0};
  const std::size_t trials[] = {20, 60, 13000};
  for (std::size_t i = 0; i < 3; ++i) {
    std::ostringstream text;
    text << "channel = awgn\nn_r = 1\nrho = 0\nusers = 1\nrb_allocation = 32\ncompressor = none\n"
         << "snr_db = " << targets[i] << "\ntrials = " << trials[i] << "\ntiming = false\n";
    const SweepResult r = run_sweep(parse(text.str()), 1);
    const double snr = std::pow(10.0, targets[i] / 10.0);
    const double expected = 4.0 / 6.0 * (1.0 - 1.0 / 8.0) * q_function(std::sqrt(3.0 * snr / 63.0));
    INFO("snr " << targets[i] << " dB: measured " << r.rows[0].ber << ", closed form " << expected);
    CHECK(r.rows[0].bit_errors > 100);
    CHECK(std::abs(r.rows[0].ber - expected) <= 0.10 * expected);
  }
}
