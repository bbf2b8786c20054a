#include "fhqr/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <random>
#include <set>
#include <thread>

#include "fhqr/error.hpp"

namespace fhqr {

std::vector<cplx> equalize_zf(const IQMatrix& y, const IQMatrix& h) {
  if (y.empty() || y.rows() != h.rows() || y.cols() != h.cols()) {
    throw InvalidInput("equalize_zf: y and h must share an N_f x N_r shape");
  }
  std::vector<cplx> s(y.rows());
  for (std::size_t f = 0; f < y.rows(); ++f) {
    auto yr = y.row(f);
    auto hr = h.row(f);
    cplx num{};
    double den = 0.0;
    for (std::size_t r = 0; r < yr.size(); ++r) {
      num += std::conj(hr[r]) * yr[r];
      den += std::norm(hr[r]);
    }
    if (!(den > 0.0)) throw EqualizationError(f, "equalize_zf: zero channel vector at subcarrier " + std::to_string(f));
    s[f] = num / den;
  }
  return s;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Scenario Scenario::build(const SimConfig& cfg) {
  cfg.validate();
  Scenario s{cfg, QamConfig(cfg.modulation), resolve_profile(cfg.channel_profile), cfg.allocations(), 0, {}, 0, {}};
  s.channel_rank = sample_delays(s.profile, cfg.sample_rate_hz(), cfg.delay_scale).size();

  const std::size_t n = cfg.grid.symbol_length();
  std::vector<UserShape> shapes;
  for (const auto& a : s.allocations) {
    const std::size_t cap = std::min(a.n_subcarriers(), cfg.n_r);
    const std::size_t l = std::clamp<std::size_t>(cfg.l_u.resolve(s.channel_rank), 1, cap);
    s.l_u.push_back(l);
    shapes.push_back(UserShape{a.n_subcarriers(), l});
  }
  s.qr_report = compression_ratio(n, cfg.n_r, 2 * cfg.quant_bits, shapes);
  s.svd_target_bits = s.qr_report.b_cmp + s.qr_report.b_ovh;
  s.svd_rank = cfg.svd_rank > 0 ? cfg.svd_rank : s.allocations.size() * s.channel_rank;
  s.svd_rank = std::min({s.svd_rank, n, cfg.n_r});
  if (std::find(cfg.compressors.begin(), cfg.compressors.end(), Compressor::kSvd) != cfg.compressors.end()) {
    s.svd_bits = svd_bits_for_budget(n, cfg.n_r, s.svd_rank, s.svd_target_bits);
  }
  return s;
}

CrReport Scenario::report_for(Compressor c) const {
  CrReport r;
  r.b_org = qr_report.b_org;
  switch (c) {
    case Compressor::kQr: return qr_report;
    case Compressor::kSvd:
      r.b_cmp = static_cast<std::uint64_t>(svd_rank) * (config.grid.symbol_length() + config.n_r) * 2 * svd_bits;
      break;
    case Compressor::kNone: r.b_cmp = r.b_org; break;
  }
  r.cr = r.b_cmp > 0 ? static_cast<double>(r.b_org) / static_cast<double>(r.b_cmp + r.b_ovh) : 0.0;
  return r;
}

std::size_t Scenario::rank_for(Compressor c) const {
  switch (c) {
    case Compressor::kQr: return l_u.front();
    case Compressor::kSvd: return svd_rank;
    case Compressor::kNone: return 0;
  }
  return 0;
}

namespace {

struct UplinkBlock {
  std::vector<Bits> bits;
  std::vector<double> amplitude;
  std::vector<std::vector<cplx>> x;  // per-user time-domain symbol
  ChannelRealization channel;
  IQMatrix y;
};

UplinkBlock simulate_block(const Scenario& s, double snr_db, std::uint64_t seed) {
  const auto& cfg = s.config;
  UplinkBlock b;
  std::mt19937_64 bit_rng(derive_seed(seed, 1));
  std::bernoulli_distribution coin(0.5);
  for (std::size_t u = 0; u < s.allocations.size(); ++u) {
    const auto& alloc = s.allocations[u];
    Bits bits(alloc.n_subcarriers() * static_cast<std::size_t>(s.qam.bits_per_symbol()));
    for (auto& bit : bits) bit = coin(bit_rng) ? 1 : 0;
    const double amp = std::pow(10.0, static_cast<double>(u) * cfg.power_step_db / 20.0);
    auto symbols = qam_modulate(bits, s.qam);
    for (auto& v : symbols) v *= amp;
    const std::vector<std::vector<cplx>> streams{std::move(symbols)};
    const UserAllocation single[] = {alloc};
    b.x.push_back(ofdm_modulate(map_subcarriers(streams, single, cfg.grid)));
    b.bits.push_back(std::move(bits));
    b.amplitude.push_back(amp);
  }
  ChannelParams params{s.allocations.size(), cfg.n_r, cfg.rho, cfg.sample_rate_hz(), cfg.delay_scale};
  b.channel = generate_channel(s.profile, params, derive_seed(seed, 2));
  const NoiseSpec noise{std::pow(10.0, -snr_db / 10.0)};
  b.y = apply_channel(b.x, b.channel, noise, derive_seed(seed, 3), cfg.grid.cp_len);
  return b;
}

// Effective per-user channel (amplitude included) laid out like Y_u.
std::vector<IQMatrix> user_channels(const Scenario& s, const UplinkBlock& b) {
  std::vector<IQMatrix> out;
  for (std::size_t u = 0; u < s.allocations.size(); ++u) {
    const auto bins = s.allocations[u].bins(s.config.grid);
    const auto resp = freq_response(b.channel, bins, s.config.grid.n_fft);
    IQMatrix h(bins.size(), s.config.n_r);
    for (std::size_t i = 0; i < bins.size(); ++i) {
      for (std::size_t r = 0; r < s.config.n_r; ++r) h(i, r) = resp[i](r, u) * b.amplitude[u];
    }
    out.push_back(std::move(h));
  }
  return out;
}

double elapsed_us(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - start).count();
}

double squared_error(const IQMatrix& a, const IQMatrix& b) {
  const double e = (a - b).frobenius_norm();
  return e * e;
}

}  // namespace

TrialResult run_trial(const Scenario& s, double snr_db, std::uint64_t trial_seed) {
  try {
    const auto& cfg = s.config;
    const UplinkBlock block = simulate_block(s, snr_db, trial_seed);
    const auto channels = user_channels(s, block);

    TrialResult result;
    for (Compressor c : cfg.compressors) {
      CompressorOutcome outcome;
      outcome.compressor = c;
      std::vector<IQMatrix> y_users;
      const auto start = std::chrono::steady_clock::now();
      switch (c) {
        case Compressor::kNone:
          y_users = extract_user_matrices(block.y, s.allocations, cfg.grid);
          break;
        case Compressor::kQr: {
          auto compressed = compress_qr_detailed(block.y, s.allocations, s.l_u, QuantizerSpec{cfg.quant_bits}, cfg.grid);
          const auto bytes = serialize(compressed.payload);
          outcome.compress_us = elapsed_us(start);
          for (auto& w : compressed.warnings) result.warnings.push_back(std::move(w));
          for (auto& um : decompress(deserialize(bytes))) y_users.push_back(std::move(um.y));
          break;
        }
        case Compressor::kSvd: {
          const auto bytes = serialize_svd(compress_svd_baseline(block.y, s.svd_rank, s.svd_target_bits));
          outcome.compress_us = elapsed_us(start);
          y_users = extract_user_matrices(decompress_svd(deserialize_svd(bytes)), s.allocations, cfg.grid);
          break;
        }
      }
      for (std::size_t u = 0; u < s.allocations.size(); ++u) {
        const auto symbols = equalize_zf(y_users[u], channels[u]);
        outcome.users.push_back(UserBits{s.allocations[u].user_id, block.bits[u], qam_demodulate(symbols, s.qam)});
      }
      result.outcomes.push_back(std::move(outcome));
    }
    return result;
  } catch (const Error& e) {
    throw Error("trial seed " + std::to_string(trial_seed) + " at " + std::to_string(snr_db) + " dB: " + e.what());
  }
}

DenoisingSample measure_denoising(const Scenario& s, double snr_db, std::uint64_t trial_seed) {
  const auto& cfg = s.config;
  const UplinkBlock block = simulate_block(s, snr_db, trial_seed);
  const IQMatrix clean = apply_channel(block.x, block.channel, NoiseSpec{0.0}, 0, cfg.grid.cp_len);
  const auto s_users = extract_user_matrices(clean, s.allocations, cfg.grid);
  const auto y_users = extract_user_matrices(block.y, s.allocations, cfg.grid);
  const auto payload = compress_qr(block.y, s.allocations, s.l_u, QuantizerSpec{cfg.quant_bits}, cfg.grid);
  const auto rebuilt = decompress(payload);

  DenoisingSample d;
  for (std::size_t u = 0; u < s_users.size(); ++u) {
    d.compressed_error += squared_error(rebuilt[u].y, s_users[u]);
    d.raw_error += squared_error(y_users[u], s_users[u]);
  }
  return d;
}

Interval wilson_interval(std::uint64_t errors, std::uint64_t total) {
  if (total == 0) return {0.0, 1.0};
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(total);
  const double p = static_cast<double>(errors) / n;
  const double denom = 1.0 + z * z / n;
  const double center = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

namespace {

struct ItemResult {
  // [compressor][user]
  std::vector<std::vector<std::uint64_t>> errors;
  std::vector<std::vector<std::uint64_t>> bits;
  std::vector<double> compress_us;
  std::vector<std::string> warnings;
};

ItemResult summarize(const TrialResult& t) {
  ItemResult r;
  for (const auto& o : t.outcomes) {
    std::vector<std::uint64_t> errs, bits;
    for (const auto& u : o.users) {
      if (u.tx.size() != u.rx.size()) throw Error("received bit count differs from transmitted bit count");
      std::uint64_t e = 0;
      for (std::size_t i = 0; i < u.tx.size(); ++i) e += u.tx[i] != u.rx[i];
      errs.push_back(e);
      bits.push_back(u.tx.size());
    }
    r.errors.push_back(std::move(errs));
    r.bits.push_back(std::move(bits));
    r.compress_us.push_back(o.compress_us);
  }
  r.warnings = t.warnings;
  return r;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

SweepResult run_sweep(const SimConfig& cfg, std::size_t workers) {
  const Scenario s = Scenario::build(cfg);
  const std::size_t n_snr = cfg.snr_db.size();
  const std::size_t n_items = n_snr * cfg.trials;
  std::vector<ItemResult> items(n_items);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < n_items; i = next++) {
      try {
        const std::size_t snr_idx = i / cfg.trials;
        const std::size_t trial = i % cfg.trials;
        items[i] = summarize(run_trial(s, cfg.snr_db[snr_idx], derive_seed(cfg.seed, trial)));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n_items;
      }
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, n_items));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  SweepResult result;
  result.channel_rank = s.channel_rank;
  std::set<std::string> warnings;
  for (const auto& it : items) warnings.insert(it.warnings.begin(), it.warnings.end());
  result.warnings.assign(warnings.begin(), warnings.end());

  const std::size_t n_users = s.allocations.size();
  for (std::size_t si = 0; si < n_snr; ++si) {
    for (std::size_t ci = 0; ci < cfg.compressors.size(); ++ci) {
      SweepRow row;
      row.snr_db = cfg.snr_db[si];
      row.compressor = cfg.compressors[ci];
      row.l_u = s.rank_for(row.compressor);
      row.trials = cfg.trials;
      row.user_tx_bits.assign(n_users, 0);
      row.user_bit_errors.assign(n_users, 0);
      std::vector<double> times;
      for (std::size_t t = 0; t < cfg.trials; ++t) {
        const auto& it = items[si * cfg.trials + t];
        for (std::size_t u = 0; u < n_users; ++u) {
          row.user_tx_bits[u] += it.bits[ci][u];
          row.user_bit_errors[u] += it.errors[ci][u];
        }
        times.push_back(it.compress_us[ci]);
      }
      for (std::size_t u = 0; u < n_users; ++u) {
        row.tx_bits += row.user_tx_bits[u];
        row.bit_errors += row.user_bit_errors[u];
      }
      row.ber = row.tx_bits ? static_cast<double>(row.bit_errors) / static_cast<double>(row.tx_bits) : 0.0;
      row.ci = wilson_interval(row.bit_errors, row.tx_bits);
      row.cr = s.report_for(row.compressor);
      row.median_compress_us = cfg.timing ? median(times) : 0.0;
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

void write_csv(const SweepResult& result, std::ostream& out) {
  out << "snr_db,compressor,l_u,trials,tx_bits,bit_errors,ber,ber_ci_low,ber_ci_high,cr,b_org,b_cmp,b_ovh,"
         "median_compress_us\n";
  char buf[512];
  for (const auto& r : result.rows) {
    std::snprintf(buf, sizeof buf, "%g,%s,%zu,%zu,%llu,%llu,%.6e,%.6e,%.6e,%.4f,%llu,%llu,%llu,%.1f\n", r.snr_db,
                  to_string(r.compressor).c_str(), r.l_u, r.trials, static_cast<unsigned long long>(r.tx_bits),
                  static_cast<unsigned long long>(r.bit_errors), r.ber, r.ci.low, r.ci.high, r.cr.cr,
                  static_cast<unsigned long long>(r.cr.b_org), static_cast<unsigned long long>(r.cr.b_cmp),
                  static_cast<unsigned long long>(r.cr.b_ovh), r.median_compress_us);
    out << buf;
  }
}

}  // namespace fhqr
