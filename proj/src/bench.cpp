#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include "fhqr/harness.hpp"

namespace fhqr {

namespace {

template <typename F>
double median_us(std::size_t repeats, F&& f) {
  std::vector<double> t;
  for (std::size_t i = 0; i < std::max<std::size_t>(repeats, 1); ++i) {
    const auto start = std::chrono::steady_clock::now();
    f();
    t.push_back(std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - start).count());
  }
  std::sort(t.begin(), t.end());
  const std::size_t m = t.size() / 2;
  return t.size() % 2 ? t[m] : 0.5 * (t[m - 1] + t[m]);
}

IQMatrix gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  IQMatrix m(rows, cols);
  for (auto& v : m.data()) v = cplx(n(rng), n(rng));
  return m;
}

}  // namespace

std::vector<BenchRow> benchmark_compressors(const SimConfig& cfg, const BenchRequest& request) {
  std::vector<BenchRow> rows;
  const QuantizerSpec quant{cfg.quant_bits};

  for (std::size_t n_f : request.n_f) {
    const IQMatrix y = gaussian_matrix(n_f, cfg.n_r, derive_seed(cfg.seed, n_f));
    for (std::size_t l : request.l_u) {
      if (l > std::min(n_f, cfg.n_r)) continue;
      const double us = median_us(request.repeats, [&] { (void)compress_user(y, 0, l, quant, nullptr); });
      rows.push_back(BenchRow{"qr-user", n_f, cfg.n_r, l, us});
    }
  }

  SimConfig sym = cfg;
  sym.compressors = {Compressor::kQr};
  const Scenario s = Scenario::build(sym);
  const double noise = std::pow(10.0, -cfg.snr_db.front() / 10.0);
  std::vector<std::vector<cplx>> x;
  {
    std::mt19937_64 rng(derive_seed(cfg.seed, 7));
    std::normal_distribution<double> n(0.0, 1.0);
    for (std::size_t u = 0; u < s.allocations.size(); ++u) {
      std::vector<std::vector<cplx>> streams(1);
      for (std::size_t i = 0; i < s.allocations[u].n_subcarriers(); ++i) streams[0].emplace_back(n(rng), n(rng));
      const UserAllocation single[] = {s.allocations[u]};
      x.push_back(ofdm_modulate(map_subcarriers(streams, single, cfg.grid)));
    }
  }
  ChannelParams params{s.allocations.size(), cfg.n_r, cfg.rho, cfg.sample_rate_hz(), cfg.delay_scale};
  const auto ch = generate_channel(s.profile, params, derive_seed(cfg.seed, 8));
  const IQMatrix y = apply_channel(x, ch, NoiseSpec{noise}, derive_seed(cfg.seed, 9), cfg.grid.cp_len);

  const double qr_us = median_us(request.repeats, [&] {
    (void)serialize(compress_qr(y, s.allocations, s.l_u, quant, cfg.grid));
  });
  rows.push_back(BenchRow{"qr-symbol", y.rows(), cfg.n_r, s.l_u.front(), qr_us});

  if (request.include_svd) {
    const std::size_t k = cfg.svd_rank > 0 ? cfg.svd_rank
                                           : std::min({s.allocations.size() * s.channel_rank, y.rows(), y.cols()});
    const std::uint64_t target = s.qr_report.b_cmp + s.qr_report.b_ovh;
    const double svd_us =
        median_us(request.repeats, [&] { (void)serialize_svd(compress_svd_baseline(y, k, target)); });
    rows.push_back(BenchRow{"svd-full", y.rows(), cfg.n_r, k, svd_us});
  }
  return rows;
}

void write_bench_table(const std::vector<BenchRow>& rows, std::ostream& out) {
  out << "kind,rows,n_r,rank,median_us\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%zu,%zu,%zu,%.1f\n", r.kind.c_str(), r.rows, r.n_r, r.rank, r.median_us);
    out << buf;
  }
}

}  // namespace fhqr
