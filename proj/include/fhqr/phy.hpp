#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fhqr/iq_matrix.hpp"

namespace fhqr {

using Bits = std::vector<std::uint8_t>;  // one bit (0 or 1) per element

/// Square Gray-coded M-QAM following the NR bit-to-symbol convention,
/// scaled to unit average energy.
class QamConfig {
 public:
  explicit QamConfig(int order = 64);

  int order() const noexcept { return order_; }
  int bits_per_symbol() const noexcept { return bits_; }
  /// Amplitude scale applied to the integer lattice points.
  double normalization() const noexcept { return norm_; }
  /// Integer PAM level for one axis given that axis' bits, MSB first.
  int axis_level(std::span<const std::uint8_t> axis_bits) const;

 private:
  int order_;
  int bits_;
  double norm_;
  std::vector<int> level_of_code_;      // axis code (bits packed MSB first) -> level
  std::vector<int> code_of_level_idx_;  // (level + side - 1) / 2 -> axis code
  friend Bits qam_demodulate(std::span<const cplx>, const QamConfig&);
};

std::vector<cplx> qam_modulate(std::span<const std::uint8_t> bits, const QamConfig& cfg);
/// Hard-decision nearest point; never fails.
Bits qam_demodulate(std::span<const cplx> symbols, const QamConfig& cfg);

inline constexpr std::size_t kSubcarriersPerRb = 12;

/// OFDM numerology. Subcarrier s of the active band sits at the signed
/// frequency index s + first_subcarrier, i.e. FFT bin (s + first_subcarrier) mod n_fft.
struct GridConfig {
  std::size_t n_fft = 4096;
  std::size_t cp_len = 288;
  std::size_t max_rbs = 273;
  /// Signed bin of active subcarrier 0; the default centers the band with DC included.
  long first_subcarrier = -1638;

  static GridConfig centered(std::size_t n_fft, std::size_t cp_len, std::size_t max_rbs);
  std::size_t symbol_length() const noexcept { return n_fft + cp_len; }
  std::size_t active_subcarriers() const noexcept { return max_rbs * kSubcarriersPerRb; }
  std::size_t bin_of(std::size_t subcarrier) const;
  void validate() const;
};

struct UserAllocation {
  std::uint16_t user_id = 0;
  std::size_t rb_start = 0;
  std::size_t rb_count = 0;

  std::size_t n_subcarriers() const noexcept { return rb_count * kSubcarriersPerRb; }
  /// Active-band subcarrier indices, contiguous.
  std::vector<std::size_t> subcarriers() const;
  /// FFT bins for this user's subcarriers, in subcarrier order.
  std::vector<std::size_t> bins(const GridConfig& grid) const;
};

/// Throws InvalidInput on overlap, duplicate ids, or RBs beyond the grid.
void validate_allocations(std::span<const UserAllocation> allocations, const GridConfig& grid);

struct OfdmGrid {
  GridConfig config;
  std::vector<cplx> bins;  // n_fft frequency bins; guard bins are zero
};

OfdmGrid map_subcarriers(std::span<const std::vector<cplx>> user_symbols,
                         std::span<const UserAllocation> allocations, const GridConfig& grid);
std::vector<std::vector<cplx>> demap_subcarriers(const OfdmGrid& grid,
                                                 std::span<const UserAllocation> allocations);

/// Unitary IDFT plus cyclic prefix; output length n_fft + cp_len.
std::vector<cplx> ofdm_modulate(const OfdmGrid& grid);
/// Drops the cyclic prefix and applies the unitary DFT.
OfdmGrid ofdm_demodulate(std::span<const cplx> time, const GridConfig& grid);

/// Per-user frequency-domain matrices (N_f_u x N_r) from a time-domain
/// N x N_r block: CP removal, DFT per antenna, RE demapping.
std::vector<IQMatrix> extract_user_matrices(const IQMatrix& y, std::span<const UserAllocation> allocations,
                                            const GridConfig& grid);

}  // namespace fhqr
