#include <algorithm>
#include <cmath>
#include <string>

#include "fhqr/codec.hpp"
#include "fhqr/error.hpp"
#include "fhqr/linalg.hpp"

namespace fhqr {

UserRecord compress_user(const IQMatrix& y_u, std::uint16_t user_id, std::size_t l_u,
                         const QuantizerSpec& quant, UserDiagnostics* diagnostics) {
  if (l_u < 1 || l_u > y_u.cols() || l_u > y_u.rows()) {
    throw InvalidInput("user " + std::to_string(user_id) + ": L_u = " + std::to_string(l_u) +
                       " outside [1, min(N_f_u, N_r)] = [1, " +
                       std::to_string(std::min(y_u.rows(), y_u.cols())) + "]");
  }
  const QrFactors f =
      pivoted_qr_approx(y_u, l_u, QrOptions{PivotRule::kOriginalNorm, DeficiencyPolicy::kComplete});

  UserRecord rec;
  rec.user_id = user_id;
  rec.n_f = static_cast<std::uint32_t>(y_u.rows());
  rec.l_u = static_cast<std::uint16_t>(l_u);
  rec.perm.assign(f.perm.begin(), f.perm.end());
  rec.q = quantize(f.q, quant);
  rec.r = quantize(f.r, quant);

  if (diagnostics != nullptr) {
    const double total = std::pow(y_u.frobenius_norm(), 2);
    const double kept = std::pow(f.r.frobenius_norm(), 2);
    diagnostics->user_id = user_id;
    diagnostics->residual_energy_fraction = total > 0.0 ? std::max(0.0, 1.0 - kept / total) : 0.0;
    diagnostics->completed_steps = f.completed_steps;
  }
  return rec;
}

QrCompression compress_qr_detailed(const IQMatrix& y, std::span<const UserAllocation> allocations,
                                   std::span<const std::size_t> l_u, const QuantizerSpec& quant,
                                   const GridConfig& grid) {
  quant.validate();
  grid.validate();
  if (l_u.size() != allocations.size()) {
    throw InvalidInput("compress_qr: " + std::to_string(l_u.size()) + " ranks for " +
                       std::to_string(allocations.size()) + " users");
  }
  const auto y_users = extract_user_matrices(y, allocations, grid);

  QrCompression out;
  auto& h = out.payload.header;
  h.n_samples = static_cast<std::uint32_t>(y.rows());
  h.n_r = static_cast<std::uint32_t>(y.cols());
  h.n_fft = static_cast<std::uint32_t>(grid.n_fft);
  h.cp_len = static_cast<std::uint32_t>(grid.cp_len);
  h.b_q = quant.bits_per_sample();
  h.n_users = static_cast<std::uint32_t>(allocations.size());

  for (std::size_t u = 0; u < allocations.size(); ++u) {
    UserDiagnostics diag;
    out.payload.users.push_back(compress_user(y_users[u], allocations[u].user_id, l_u[u], quant, &diag));
    if (!diag.completed_steps.empty()) {
      out.warnings.push_back("user " + std::to_string(diag.user_id) + ": L_u = " + std::to_string(l_u[u]) +
                             " exceeds the numerical rank of Y_u; " +
                             std::to_string(diag.completed_steps.size()) + " basis vectors synthesized");
    }
    out.diagnostics.push_back(std::move(diag));
  }
  return out;
}

CompressedPayload compress_qr(const IQMatrix& y, std::span<const UserAllocation> allocations,
                              std::span<const std::size_t> l_u, const QuantizerSpec& quant,
                              const GridConfig& grid) {
  return compress_qr_detailed(y, allocations, l_u, quant, grid).payload;
}

IQMatrix decompress_user(const UserRecord& rec, const QuantizerSpec& quant) {
  QrFactors f;
  f.q = dequantize(rec.q, quant);
  f.r = dequantize(rec.r, quant);
  f.perm.assign(rec.perm.begin(), rec.perm.end());
  f.l_u = rec.l_u;
  return qr_reconstruct(f);
}

std::vector<UserMatrix> decompress(const CompressedPayload& p) {
  const QuantizerSpec quant = p.quantizer();
  std::vector<UserMatrix> out;
  out.reserve(p.users.size());
  for (const auto& rec : p.users) out.push_back(UserMatrix{rec.user_id, decompress_user(rec, quant)});
  return out;
}

unsigned svd_bits_for_budget(std::size_t n, std::size_t n_r, std::size_t k, std::uint64_t target_bits) {
  const std::uint64_t samples = static_cast<std::uint64_t>(k) * (n + n_r);
  if (samples == 0) throw InvalidInput("svd_bits_for_budget: empty factor set");
  const std::uint64_t b = std::min<std::uint64_t>(target_bits / (2 * samples), 16);
  if (b < 2) {
    throw InfeasibleBudget("SVD baseline: " + std::to_string(target_bits) + " bits cannot hold " +
                           std::to_string(samples) + " complex samples at 2 bits per component");
  }
  return static_cast<unsigned>(b);
}

SvdPayload compress_svd_baseline(const IQMatrix& y, std::size_t rank_k, std::uint64_t target_bits) {
  if (y.empty()) throw InvalidInput("compress_svd_baseline: empty input");
  if (rank_k < 1 || rank_k > std::min(y.rows(), y.cols())) {
    throw InvalidInput("compress_svd_baseline: rank " + std::to_string(rank_k) + " out of range");
  }
  const unsigned b = svd_bits_for_budget(y.rows(), y.cols(), rank_k, target_bits);
  SvdFactors f = truncated_svd(y, rank_k);
  for (std::size_t i = 0; i < f.u.rows(); ++i) {
    for (std::size_t j = 0; j < rank_k; ++j) f.u(i, j) *= f.s[j];
  }
  const QuantizerSpec spec{b};
  SvdPayload p;
  p.n_samples = static_cast<std::uint32_t>(y.rows());
  p.n_r = static_cast<std::uint32_t>(y.cols());
  p.k = static_cast<std::uint32_t>(rank_k);
  p.bits_per_component = b;
  p.us = quantize(f.u, spec);
  p.v = quantize(f.v, spec);
  return p;
}

IQMatrix decompress_svd(const SvdPayload& p) {
  const QuantizerSpec spec{p.bits_per_component};
  return matmul(dequantize(p.us, spec), adjoint(dequantize(p.v, spec)));
}

}  // namespace fhqr
