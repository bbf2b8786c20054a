#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fhqr/phy.hpp"

namespace fhqr {

enum class Compressor { kNone, kQr, kSvd };

std::string to_string(Compressor c);
Compressor parse_compressor(const std::string& name);

/// Truncation rank policy: a fixed count, or a multiple of the channel rank
/// ("rank", "2*rank").
struct LuPolicy {
  std::size_t fixed = 0;
  std::size_t rank_multiple = 1;

  bool rank_relative() const noexcept { return fixed == 0; }
  std::size_t resolve(std::size_t channel_rank) const noexcept {
    return rank_relative() ? rank_multiple * channel_rank : fixed;
  }
  std::string to_string() const;
  static LuPolicy parse(const std::string& text);
};

struct SimConfig {
  int modulation = 64;
  std::size_t n_r = 64;
  GridConfig grid = GridConfig::centered(512, 36, 32);
  double scs_hz = 30e3;
  std::string channel_profile = "tdla30";
  double delay_scale = 7.5;
  double rho = 0.7;
  /// RB count per user, users ordered by increasing received SNR.
  std::vector<std::size_t> rb_counts = {8, 8, 8, 8};
  /// User u transmits u * power_step_db above user 0.
  double power_step_db = 1.0;
  LuPolicy l_u;
  unsigned quant_bits = 15;
  std::vector<Compressor> compressors = {Compressor::kQr, Compressor::kSvd, Compressor::kNone};
  /// 0 selects users * channel rank, capped at min(N, N_r).
  std::size_t svd_rank = 0;
  std::vector<double> snr_db = {-6.0, -4.0, -2.0, 0.0};
  std::size_t trials = 200;
  std::uint64_t seed = 1;
  /// Timing columns are wall-clock and therefore not reproducible; off writes zeros.
  bool timing = true;

  double sample_rate_hz() const noexcept { return static_cast<double>(grid.n_fft) * scs_hz; }
  std::size_t n_users() const noexcept { return rb_counts.size(); }
  /// Allocations packed contiguously from RB 0, user ids 0..n-1.
  std::vector<UserAllocation> allocations() const;
  void validate() const;
};

/// Reference RB counts for the 8- and 12-user scenarios, users in increasing-SNR order.
std::vector<std::size_t> reference_rb_counts(std::size_t users);
/// Contiguous packing from RB 0; user u gets id u.
std::vector<UserAllocation> pack_allocations(const std::vector<std::size_t>& rb_counts);
/// pack_allocations(reference_rb_counts(users)); users must be 8 or 12.
std::vector<UserAllocation> allocate_reference_rbs(std::size_t users);

/// 64 antennas, 512-point FFT, 4 users x 8 RBs; fast enough for CI.
SimConfig desk_config();
/// 256 antennas, 4096-point FFT, CP 288, 273 RBs, TDLA30 unscaled, 8 users.
SimConfig table1_config();

/// Flat `key = value` lines applied on top of `base`. Unknown keys are errors.
SimConfig parse_config(std::istream& in, SimConfig base);
SimConfig load_config(const std::string& path, bool full_scale);

}  // namespace fhqr
