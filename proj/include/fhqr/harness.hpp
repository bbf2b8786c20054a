#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fhqr/channel.hpp"
#include "fhqr/codec.hpp"
#include "fhqr/config.hpp"
#include "fhqr/iq_matrix.hpp"
#include "fhqr/phy.hpp"

namespace fhqr {

/// Single-stream zero-forcing across antennas, per subcarrier:
/// s(f) = h(f)^H y(f) / h(f)^H h(f). `h` has the same N_f_u x N_r layout as `y`.
/// Throws EqualizationError for an all-zero channel row.
std::vector<cplx> equalize_zf(const IQMatrix& y, const IQMatrix& h);

/// Everything that depends only on the configuration, resolved once.
struct Scenario {
  SimConfig config;
  QamConfig qam;
  TdlProfile profile;
  std::vector<UserAllocation> allocations;
  std::size_t channel_rank = 0;  // distinct sample delays
  std::vector<std::size_t> l_u;  // per user, clamped to [1, min(N_f_u, N_r)]
  std::size_t svd_rank = 0;
  CrReport qr_report;
  std::uint64_t svd_target_bits = 0;
  unsigned svd_bits = 0;  // per component, 0 when the SVD baseline is not selected

  static Scenario build(const SimConfig& cfg);
  CrReport report_for(Compressor c) const;
  /// Column value for l_u: QR rank (first user's), SVD rank, or 0.
  std::size_t rank_for(Compressor c) const;
};

/// Deterministic seed derivation (splitmix64).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

struct UserBits {
  std::uint16_t user_id = 0;
  Bits tx;
  Bits rx;
};

struct CompressorOutcome {
  Compressor compressor = Compressor::kNone;
  std::vector<UserBits> users;
  double compress_us = 0.0;
};

struct TrialResult {
  std::vector<CompressorOutcome> outcomes;  // one per configured compressor, config order
  std::vector<std::string> warnings;
};

/// One uplink symbol: random bits, modulation, channel, noise, every configured
/// compressor on the same received block, ZF equalization, demodulation.
TrialResult run_trial(const Scenario& scenario, double snr_db, std::uint64_t trial_seed);

/// Squared errors against the noiseless received signal, summed over users.
struct DenoisingSample {
  double compressed_error = 0.0;  // sum_u ||Y_u0 - S_u||_F^2
  double raw_error = 0.0;         // sum_u ||Y_u - S_u||_F^2
};

DenoisingSample measure_denoising(const Scenario& scenario, double snr_db, std::uint64_t trial_seed);

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// 95% Wilson score interval for `errors` out of `total`.
Interval wilson_interval(std::uint64_t errors, std::uint64_t total);

struct SweepRow {
  double snr_db = 0.0;
  Compressor compressor = Compressor::kNone;
  std::size_t l_u = 0;
  std::size_t trials = 0;
  std::uint64_t tx_bits = 0;
  std::uint64_t bit_errors = 0;
  std::vector<std::uint64_t> user_tx_bits;
  std::vector<std::uint64_t> user_bit_errors;
  double ber = 0.0;
  Interval ci;
  CrReport cr;
  double median_compress_us = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // SNR-major, compressors in config order
  std::size_t channel_rank = 0;
  std::vector<std::string> warnings;
};

/// Trial t at every SNR point uses seed derive_seed(master, t), so SNR points
/// and compressors are paired. Results do not depend on `workers`.
SweepResult run_sweep(const SimConfig& cfg, std::size_t workers = 1);

void write_csv(const SweepResult& result, std::ostream& out);

// ---------------------------------------------------------------------------
// Benchmarks

struct BenchRow {
  std::string kind;  // "qr-user", "qr-symbol", "svd-full"
  std::size_t rows = 0;
  std::size_t n_r = 0;
  std::size_t rank = 0;
  double median_us = 0.0;
};

struct BenchRequest {
  std::vector<std::size_t> n_f = {96, 192, 384, 480};
  std::vector<std::size_t> l_u = {12, 24};
  std::size_t repeats = 10;
  bool include_svd = true;
};

/// Median wall-clock of per-user QR compression over the (n_f, l_u) grid,
/// full-symbol QR compression of the configured scenario, and the SVD
/// baseline on the same time-domain block.
std::vector<BenchRow> benchmark_compressors(const SimConfig& cfg, const BenchRequest& request);

void write_bench_table(const std::vector<BenchRow>& rows, std::ostream& out);

}  // namespace fhqr
