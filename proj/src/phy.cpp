#include "fhqr/phy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fhqr/error.hpp"
#include "fhqr/fft.hpp"

namespace fhqr {

// ---------------------------------------------------------------------------
// QAM

QamConfig::QamConfig(int order) : order_(order) {
  if (order != 4 && order != 16 && order != 64 && order != 256) {
    throw InvalidInput("QAM order must be 4, 16, 64 or 256, got " + std::to_string(order));
  }
  bits_ = static_cast<int>(std::lround(std::log2(order)));
  norm_ = 1.0 / std::sqrt(2.0 * (order - 1) / 3.0);

  const int axis_bits = bits_ / 2;
  const int side = 1 << axis_bits;
  level_of_code_.resize(side);
  code_of_level_idx_.resize(side);
  std::vector<std::uint8_t> b(axis_bits);
  for (int code = 0; code < side; ++code) {
    for (int k = 0; k < axis_bits; ++k) b[k] = (code >> (axis_bits - 1 - k)) & 1;
    const int level = axis_level(b);
    level_of_code_[code] = level;
    code_of_level_idx_[(level + side - 1) / 2] = code;
  }
}

int QamConfig::axis_level(std::span<const std::uint8_t> axis_bits) const {
  // Nested form (1-2b0)(2^{m-1} - (1-2b1)(2^{m-2} - ... (1-2b_{m-1}))).
  const int m = static_cast<int>(axis_bits.size());
  int v = 1 - 2 * axis_bits[m - 1];
  for (int k = m - 2; k >= 0; --k) v = (1 - 2 * axis_bits[k]) * ((1 << (m - 1 - k)) - v);
  return v;
}

std::vector<cplx> qam_modulate(std::span<const std::uint8_t> bits, const QamConfig& cfg) {
  const std::size_t bps = static_cast<std::size_t>(cfg.bits_per_symbol());
  if (bits.size() % bps != 0) {
    throw InvalidInput("qam_modulate: " + std::to_string(bits.size()) +
                       " bits is not a multiple of " + std::to_string(bps));
  }
  const std::size_t axis_bits = bps / 2;
  std::vector<std::uint8_t> i_bits(axis_bits), q_bits(axis_bits);
  std::vector<cplx> out(bits.size() / bps);
  for (std::size_t s = 0; s < out.size(); ++s) {
    for (std::size_t k = 0; k < axis_bits; ++k) {
      i_bits[k] = bits[s * bps + 2 * k] & 1;
      q_bits[k] = bits[s * bps + 2 * k + 1] & 1;
    }
    out[s] = cfg.normalization() * cplx(cfg.axis_level(i_bits), cfg.axis_level(q_bits));
  }
  return out;
}

Bits qam_demodulate(std::span<const cplx> symbols, const QamConfig& cfg) {
  const int bps = cfg.bits_per_symbol();
  const int axis_bits = bps / 2;
  const int side = 1 << axis_bits;
  auto axis_code = [&](double x) {
    const double scaled = (x / cfg.normalization() + (side - 1)) / 2.0;
    const long idx = std::clamp(std::lround(scaled), 0L, static_cast<long>(side - 1));
    return cfg.code_of_level_idx_[static_cast<std::size_t>(idx)];
  };
  Bits out(symbols.size() * static_cast<std::size_t>(bps));
  for (std::size_t s = 0; s < symbols.size(); ++s) {
    const int ci = axis_code(symbols[s].real());
    const int cq = axis_code(symbols[s].imag());
    for (int k = 0; k < axis_bits; ++k) {
      out[s * bps + 2 * k] = (ci >> (axis_bits - 1 - k)) & 1;
      out[s * bps + 2 * k + 1] = (cq >> (axis_bits - 1 - k)) & 1;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Resource grid

GridConfig GridConfig::centered(std::size_t n_fft, std::size_t cp_len, std::size_t max_rbs) {
  GridConfig g;
  g.n_fft = n_fft;
  g.cp_len = cp_len;
  g.max_rbs = max_rbs;
  g.first_subcarrier = -static_cast<long>(max_rbs * kSubcarriersPerRb / 2);
  g.validate();
  return g;
}

void GridConfig::validate() const {
  if (n_fft < 2 || (n_fft & (n_fft - 1)) != 0) {
    throw InvalidInput("n_fft must be a power of two, got " + std::to_string(n_fft));
  }
  if (cp_len >= n_fft) throw InvalidInput("cp_len must be smaller than n_fft");
  if (max_rbs == 0 || active_subcarriers() > n_fft) {
    throw InvalidInput("max_rbs " + std::to_string(max_rbs) + " does not fit in n_fft " +
                       std::to_string(n_fft));
  }
  const long n = static_cast<long>(n_fft);
  const long last = first_subcarrier + static_cast<long>(active_subcarriers()) - 1;
  if (first_subcarrier < -n / 2 || last >= n / 2) {
    throw InvalidInput("active band does not fit inside [-n_fft/2, n_fft/2)");
  }
}

std::size_t GridConfig::bin_of(std::size_t subcarrier) const {
  const long n = static_cast<long>(n_fft);
  const long f = first_subcarrier + static_cast<long>(subcarrier);
  return static_cast<std::size_t>(((f % n) + n) % n);
}

std::vector<std::size_t> UserAllocation::subcarriers() const {
  std::vector<std::size_t> out(n_subcarriers());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = rb_start * kSubcarriersPerRb + i;
  return out;
}

std::vector<std::size_t> UserAllocation::bins(const GridConfig& grid) const {
  auto sc = subcarriers();
  for (auto& s : sc) s = grid.bin_of(s);
  return sc;
}

void validate_allocations(std::span<const UserAllocation> allocations, const GridConfig& grid) {
  std::vector<int> owner(grid.max_rbs, -1);
  std::vector<std::uint16_t> ids;
  for (std::size_t u = 0; u < allocations.size(); ++u) {
    const auto& a = allocations[u];
    if (a.rb_count == 0) throw InvalidInput("user " + std::to_string(a.user_id) + " has no RBs");
    if (a.rb_start + a.rb_count > grid.max_rbs) {
      throw InvalidInput("user " + std::to_string(a.user_id) + " allocation exceeds " +
                         std::to_string(grid.max_rbs) + " RBs");
    }
    if (std::find(ids.begin(), ids.end(), a.user_id) != ids.end()) {
      throw InvalidInput("duplicate user id " + std::to_string(a.user_id));
    }
    ids.push_back(a.user_id);
    for (std::size_t rb = a.rb_start; rb < a.rb_start + a.rb_count; ++rb) {
      if (owner[rb] >= 0) {
        throw InvalidInput("RB " + std::to_string(rb) + " allocated to users " +
                           std::to_string(allocations[owner[rb]].user_id) + " and " +
                           std::to_string(a.user_id));
      }
      owner[rb] = static_cast<int>(u);
    }
  }
}

OfdmGrid map_subcarriers(std::span<const std::vector<cplx>> user_symbols,
                         std::span<const UserAllocation> allocations, const GridConfig& grid) {
  grid.validate();
  validate_allocations(allocations, grid);
  if (user_symbols.size() != allocations.size()) {
    throw InvalidInput("map_subcarriers: symbol streams and allocations differ in count");
  }
  OfdmGrid out{grid, std::vector<cplx>(grid.n_fft)};
  for (std::size_t u = 0; u < allocations.size(); ++u) {
    const auto bins = allocations[u].bins(grid);
    if (user_symbols[u].size() != bins.size()) {
      throw InvalidInput("map_subcarriers: user " + std::to_string(allocations[u].user_id) + " has " +
                         std::to_string(user_symbols[u].size()) + " symbols for " +
                         std::to_string(bins.size()) + " subcarriers");
    }
    for (std::size_t i = 0; i < bins.size(); ++i) out.bins[bins[i]] = user_symbols[u][i];
  }
  return out;
}

std::vector<std::vector<cplx>> demap_subcarriers(const OfdmGrid& grid,
                                                 std::span<const UserAllocation> allocations) {
  validate_allocations(allocations, grid.config);
  std::vector<std::vector<cplx>> out;
  out.reserve(allocations.size());
  for (const auto& a : allocations) {
    std::vector<cplx> sym;
    sym.reserve(a.n_subcarriers());
    for (auto b : a.bins(grid.config)) sym.push_back(grid.bins[b]);
    out.push_back(std::move(sym));
  }
  return out;
}

std::vector<cplx> ofdm_modulate(const OfdmGrid& grid) {
  grid.config.validate();
  if (grid.bins.size() != grid.config.n_fft) throw InvalidInput("ofdm_modulate: grid size mismatch");
  const auto body = unitary_dft(grid.bins, FftDirection::kInverse);
  std::vector<cplx> out;
  out.reserve(grid.config.symbol_length());
  out.insert(out.end(), body.end() - static_cast<long>(grid.config.cp_len), body.end());
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

OfdmGrid ofdm_demodulate(std::span<const cplx> time, const GridConfig& grid) {
  grid.validate();
  if (time.size() != grid.symbol_length()) {
    throw InvalidInput("ofdm_demodulate: expected " + std::to_string(grid.symbol_length()) +
                       " samples, got " + std::to_string(time.size()));
  }
  return OfdmGrid{grid, unitary_dft(time.subspan(grid.cp_len), FftDirection::kForward)};
}

std::vector<IQMatrix> extract_user_matrices(const IQMatrix& y, std::span<const UserAllocation> allocations,
                                            const GridConfig& grid) {
  validate_allocations(allocations, grid);
  if (y.rows() != grid.symbol_length()) {
    throw InvalidInput("extract_user_matrices: expected " + std::to_string(grid.symbol_length()) +
                       " rows, got " + std::to_string(y.rows()));
  }
  std::vector<IQMatrix> out;
  std::vector<std::vector<std::size_t>> bins;
  for (const auto& a : allocations) {
    out.emplace_back(a.n_subcarriers(), y.cols());
    bins.push_back(a.bins(grid));
  }
  for (std::size_t r = 0; r < y.cols(); ++r) {
    const auto freq = ofdm_demodulate(y.column(r), grid);
    for (std::size_t u = 0; u < allocations.size(); ++u) {
      for (std::size_t i = 0; i < bins[u].size(); ++i) out[u](i, r) = freq.bins[bins[u][i]];
    }
  }
  return out;
}

}  // namespace fhqr
