// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "fhqr/harness.hpp"
#include "fhqr/linalg.hpp"
#include "support.hpp"

using namespace fhqr;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// SNR points where uncompressed desk-scale BER lies between 1e-3 and 1e-1.
const std::vector<double> kMidRangeSnrDb = {-6.0, -4.0, -2.0, 0.0, 2.0};

Outcome compression_ratios() {
  struct Case {
    std::size_t users, l;
    double reported;
  };
  const Case cases[] = {{8, 12, 17.4}, {8, 24, 8.9}, {12, 12, 14.5}, {12, 24, 7.3}};
  Outcome o{true, ""};
  for (const auto& c : cases) {
    SimConfig cfg = table1_config();
    cfg.rb_counts = reference_rb_counts(c.users);
    cfg.l_u = LuPolicy{c.l, 1};
    cfg.compressors = {Compressor::kQr};
    const double cr = Scenario::build(cfg).qr_report.cr;

    // Independent arithmetic on the closed form.
    double b_cmp = 0.0;
    for (auto rb : reference_rb_counts(c.users)) b_cmp += double(c.l) * (12.0 * rb + 256) * 30;
    const double formula = 4384.0 * 256 * 30 / (b_cmp + double(c.users) * 256 * 8);

    const double rel = std::abs(cr - c.reported) / c.reported;
    const bool ok = rel <= 0.05 && std::abs(cr - formula) <= 1e-9 * formula;
    o.pass = o.pass && ok;
    o.detail += fmt("%zu users L_u=%zu: %.3f vs %.1f (%.1f%%)%s; ", c.users, c.l, cr, c.reported, 100 * rel,
                    ok ? "" : " OUT");
  }
  return o;
}

Outcome bit_exactness() {
  std::mt19937_64 rng(2024);
  int good = 0;
  std::string first_failure;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n_r = 2 + rng() % 63;
    const std::size_t users = 1 + rng() % 4;
    const unsigned bpc = 2 + static_cast<unsigned>(rng() % 15);
    const GridConfig grid = GridConfig::centered(512, 36, 32);
    std::vector<std::size_t> rbs;
    std::size_t left = 32;
    for (std::size_t u = 0; u < users && left > 0; ++u) {
      rbs.push_back(1 + rng() % std::min<std::size_t>(left, 10));
      left -= rbs.back();
    }
    const auto alloc = pack_allocations(rbs);
    std::vector<std::size_t> l_u;
    for (const auto& a : alloc) l_u.push_back(1 + rng() % std::min(a.n_subcarriers(), n_r));

    const IQMatrix y = testing::random_matrix(grid.symbol_length(), n_r, rng);
    const CompressedPayload payload = compress_qr(y, alloc, l_u, QuantizerSpec{bpc}, grid);
    const auto bytes = serialize(payload);

    // B_cmp and B_ovh from the closed forms, plus the fixed framing.
    unsigned idx_bits = 0;
    while ((std::size_t{1} << idx_bits) < n_r) ++idx_bits;
    std::uint64_t b_cmp = 0, b_ovh = 0, expected = 240;
    std::vector<UserShape> shapes;
    for (std::size_t u = 0; u < alloc.size(); ++u) {
      const std::uint64_t cmp = l_u[u] * (alloc[u].n_subcarriers() + n_r) * 2ull * bpc;
      const std::uint64_t ovh = n_r * idx_bits;
      b_cmp += cmp;
      b_ovh += ovh;
      expected += (64 + 64 + cmp + ovh + 7) / 8 * 8;
      shapes.push_back({alloc[u].n_subcarriers(), l_u[u]});
    }
    const CrReport report = compression_ratio(grid.symbol_length(), n_r, 2 * bpc, shapes);
    const bool ok = bytes.size() * 8 == expected && report.b_cmp == b_cmp && report.b_ovh == b_ovh &&
                    deserialize(bytes) == payload;
    good += ok;
    if (!ok && first_failure.empty()) {
      first_failure = fmt(" first mismatch: config %d, %zu bytes vs %llu bits", trial, bytes.size(),
                          static_cast<unsigned long long>(expected));
    }
  }
  return {good == 20, fmt("%d/20 random configurations match header + B_cmp + B_ovh + framing", good) + first_failure};
}

Outcome qr_correctness() {
  std::mt19937_64 rng(77);
  int exact_ok = 0, bound_ok = 0, bound_checks = 0;
  double worst_exact = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t r = 1 + rng() % 12;
    const std::size_t n_r = r + rng() % (64 - r + 1);
    const std::size_t n_f = std::max(r, std::size_t{16}) + rng() % (512 - std::max(r, std::size_t{16}) + 1);
    const IQMatrix a = testing::random_rank(n_f, n_r, r, rng);
    const double err = frobenius_error(a, qr_reconstruct(pivoted_qr_approx(a, r)));
    worst_exact = std::max(worst_exact, err);
    exact_ok += err < 1e-10;
    const auto s = testing::singular_values(a);
    for (std::size_t l = 1; l < r; ++l) {
      const double qr_err = (a - qr_reconstruct(pivoted_qr_approx(a, l))).frobenius_norm();
      // Slack of a few ulps of ||A|| for rounding in both computations.
      bound_ok += qr_err >= testing::optimal_error(s, l) - 1e-13 * a.frobenius_norm();
      ++bound_checks;
    }
  }
  return {exact_ok == 100 && bound_ok == bound_checks,
          fmt("exact-rank recovery %d/100 (worst %.2e); Eckart-Young bound held %d/%d", exact_ok, worst_exact,
              bound_ok, bound_checks)};
}

SimConfig desk(const std::string& overrides) {
  std::istringstream in(overrides);
  return parse_config(in, desk_config());
}

Outcome denoising() {
  SimConfig cfg = desk("l_u = rank\ncompressor = qr, none\ntrials = 200\ntiming = false\n");
  cfg.snr_db = kMidRangeSnrDb;
  const Scenario s = Scenario::build(cfg);

  bool ratio_ok = true;
  std::string detail = "ratio";
  for (double snr : cfg.snr_db) {
    double compressed = 0.0, raw = 0.0;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      const DenoisingSample d = measure_denoising(s, snr, derive_seed(cfg.seed, t));
      compressed += d.compressed_error;
      raw += d.raw_error;
    }
    ratio_ok = ratio_ok && compressed / raw <= 0.5;
    detail += fmt(" %g dB:%.3f", snr, compressed / raw);
  }

  const SweepResult r = run_sweep(cfg, 1);
  bool ber_ok = true;
  detail += "; BER qr/none";
  for (std::size_t i = 0; i < r.rows.size(); i += 2) {
    const auto& qr = r.rows[i];
    const auto& none = r.rows[i + 1];
    ber_ok = ber_ok && qr.ber <= none.ber;
    detail += fmt(" %g dB:%.2e/%.2e", qr.snr_db, qr.ber, none.ber);
  }
  return {ratio_ok && ber_ok, detail + fmt(" (L_u=%zu, 200 trials)", s.l_u.front())};
}

Outcome baseline_ordering() {
  SimConfig cfg = desk("l_u = 2*rank\ncompressor = qr, svd-baseline\ntrials = 500\ntiming = false\n");
  cfg.snr_db = kMidRangeSnrDb;
  const SweepResult r = run_sweep(cfg, 1);
  bool ok = true;
  std::string detail = "BER qr/svd";
  for (std::size_t i = 0; i < r.rows.size(); i += 2) {
    const auto& qr = r.rows[i];
    const auto& svd = r.rows[i + 1];
    ok = ok && qr.ber <= svd.ber;
    detail += fmt(" %g dB:%.2e/%.2e", qr.snr_db, qr.ber, svd.ber);
  }
  const auto& first = r.rows.front();
  const auto& second = r.rows[1];
  detail += fmt(" (QR L_u=%zu %llu bits, SVD k=%zu %llu bits, 500 trials)", first.l_u,
                static_cast<unsigned long long>(first.cr.b_cmp + first.cr.b_ovh), second.l_u,
                static_cast<unsigned long long>(second.cr.b_cmp));
  return {ok, detail};
}

Outcome complexity() {
  SimConfig cfg = table1_config();
  BenchRequest req;
  req.n_f = {312, 480};
  req.l_u = {12, 24};
  req.repeats = 10;
  const auto rows = benchmark_compressors(cfg, req);
  auto time_of = [&](const std::string& kind, std::size_t n_f, std::size_t l) {
    for (const auto& r : rows)
      if (r.kind == kind && (n_f == 0 || r.rows == n_f) && (l == 0 || r.rank == l)) return r.median_us;
    return std::nan("");
  };
  bool ok = true;
  std::string detail;
  for (std::size_t n_f : req.n_f) {
    const double ratio = time_of("qr-user", n_f, 24) / time_of("qr-user", n_f, 12);
    ok = ok && ratio <= 2.5;
    detail += fmt("N_f=%zu L_u 24/12 time ratio %.2f; ", n_f, ratio);
  }
  const double qr = time_of("qr-symbol", 0, 0);
  const double svd = time_of("svd-full", 0, 0);
  ok = ok && qr < svd;
  detail += fmt("full symbol QR %.0f us vs SVD %.0f us (median of 10)", qr, svd);
  return {ok, detail};
}

Outcome chain_sanity() {
  std::mt19937_64 rng(99);
  std::uint64_t errors = 0, bits = 0;
  auto count = [&](const Scenario& s, std::size_t trials) {
    for (std::size_t t = 0; t < trials; ++t) {
      for (const auto& o : run_trial(s, INFINITY, derive_seed(5, t)).outcomes) {
        for (const auto& u : o.users) {
          for (std::size_t i = 0; i < u.tx.size(); ++i) errors += u.tx[i] != u.rx[i];
          bits += u.tx.size();
        }
      }
    }
  };
  count(Scenario::build(desk("compressor = none\n")), 20);
  SimConfig full = table1_config();
  full.compressors = {Compressor::kNone};
  count(Scenario::build(full), 1);

  // OFDM round trip over random grids.
  double ofdm_worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n_fft = std::size_t{64} << (rng() % 7);
    const std::size_t max_rbs = 1 + rng() % (n_fft / 12 - 1);
    const GridConfig g = GridConfig::centered(n_fft, n_fft / 14, max_rbs);
    std::vector<std::size_t> rbs;
    for (std::size_t left = max_rbs; left > 0 && rbs.size() < 6;) {
      rbs.push_back(1 + rng() % left);
      left -= rbs.back();
    }
    const auto alloc = pack_allocations(rbs);
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<std::vector<cplx>> streams;
    for (const auto& a : alloc) {
      streams.emplace_back(a.n_subcarriers());
      for (auto& v : streams.back()) v = cplx(n(rng), n(rng));
    }
    const auto back = demap_subcarriers(ofdm_demodulate(ofdm_modulate(map_subcarriers(streams, alloc, g)), g), alloc);
    for (std::size_t u = 0; u < alloc.size(); ++u)
      for (std::size_t k = 0; k < streams[u].size(); ++k) ofdm_worst = std::max(ofdm_worst, std::abs(back[u][k] - streams[u][k]));
  }

  // QAM round trip for every order, exact symbols and points perturbed inside the decision region.
  std::uint64_t qam_errors = 0;
  std::uniform_real_distribution<double> jitter(-0.49, 0.49);
  for (int order : {4, 16, 64, 256}) {
    const QamConfig qam(order);
    Bits b(static_cast<std::size_t>(qam.bits_per_symbol()) * 4000);
    for (auto& x : b) x = rng() & 1;
    auto sym = qam_modulate(b, qam);
    const Bits exact = qam_demodulate(sym, qam);
    for (auto& s : sym) s += qam.normalization() * cplx(jitter(rng), jitter(rng));
    const Bits near = qam_demodulate(sym, qam);
    for (std::size_t i = 0; i < b.size(); ++i) qam_errors += (exact[i] != b[i]) + (near[i] != b[i]);
  }

  const bool ok = errors == 0 && bits > 0 && ofdm_worst < 1e-10 && qam_errors == 0;
  return {ok, fmt("noiseless BER %llu/%llu; OFDM worst error %.2e; QAM bit errors %llu",
                  static_cast<unsigned long long>(errors), static_cast<unsigned long long>(bits), ofdm_worst,
                  static_cast<unsigned long long>(qam_errors))};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"compression ratio reproduction", compression_ratios},
      {"payload bit-exactness", bit_exactness},
      {"pivoted QR correctness", qr_correctness},
      {"denoising gain", denoising},
      {"baseline ordering vs SVD", baseline_ordering},
      {"complexity", complexity},
      {"chain sanity", chain_sanity},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::printf("%s  %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
  return failures == 0 ? 0 : 1;
}
