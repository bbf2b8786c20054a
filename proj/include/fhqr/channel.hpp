#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fhqr/iq_matrix.hpp"

namespace fhqr {

/// Tapped-delay-line power-delay profile.
struct TdlProfile {
  std::string name;
  std::vector<double> tap_delays_ns;
  std::vector<double> tap_powers_db;
  /// False for a deterministic unit-gain line-of-sight profile (AWGN-only runs).
  bool rayleigh = true;

  void validate() const;
  /// Linear tap powers scaled to sum to one.
  std::vector<double> normalized_powers() const;
  double rms_delay_spread_ns() const;
};

/// The 12-tap TDLA30 profile (30 ns RMS delay spread).
TdlProfile tdla30_profile();
/// Single unit-gain tap at zero delay, no fading.
TdlProfile awgn_profile();

/// Text table: optional `name <id>` line, then `delay_ns power_db` per line.
/// `#` starts a comment.
TdlProfile parse_profile(std::istream& in, const std::string& default_name);
TdlProfile load_profile(const std::string& path);
/// Built-in name (`tdla30`, `awgn`) or a profile table path.
TdlProfile resolve_profile(const std::string& name_or_path);

/// Distinct tap delays in samples after nearest-sample rounding, ascending.
std::vector<std::size_t> sample_delays(const TdlProfile& profile, double sample_rate_hz,
                                       double delay_scale = 1.0);

/// Lower-triangular Cholesky factor of R[i][j] = rho^|i-j|.
IQMatrix exp_correlation_sqrt(double rho, std::size_t n_r);

struct ChannelTap {
  std::size_t delay_samples = 0;
  IQMatrix gains;  // N_r x N_u
};

struct ChannelRealization {
  std::vector<ChannelTap> taps;  // strictly increasing delays
  double rho = 0.0;
  double sample_rate_hz = 0.0;

  std::size_t n_r() const { return taps.empty() ? 0 : taps.front().gains.rows(); }
  std::size_t n_u() const { return taps.empty() ? 0 : taps.front().gains.cols(); }
  std::size_t max_delay() const { return taps.empty() ? 0 : taps.back().delay_samples; }
};

struct ChannelParams {
  std::size_t n_u = 1;
  std::size_t n_r = 1;
  double rho = 0.0;
  double sample_rate_hz = 122.88e6;
  /// Multiplies every tap delay before sampling.
  double delay_scale = 1.0;
};

ChannelRealization generate_channel(const TdlProfile& profile, const ChannelParams& params,
                                    std::uint64_t seed);

struct NoiseSpec {
  double variance = 0.0;  // per complex sample
};

/// Received N x N_r block: circular convolution of each user's CP-bearing
/// symbol with every tap, summed over users, plus complex AWGN.
/// Throws ConfigError if any tap delay reaches cp_len.
IQMatrix apply_channel(std::span<const std::vector<cplx>> x, const ChannelRealization& ch,
                       const NoiseSpec& noise, std::uint64_t seed, std::size_t cp_len);

/// H(f)[r][u] = sum_i g_i[r][u] exp(-j 2 pi f d_i / n_fft), one N_r x N_u matrix per bin.
std::vector<IQMatrix> freq_response(const ChannelRealization& ch, std::span<const std::size_t> bins,
                                    std::size_t n_fft);

}  // namespace fhqr
