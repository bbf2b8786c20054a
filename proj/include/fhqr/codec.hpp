#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fhqr/iq_matrix.hpp"
#include "fhqr/phy.hpp"

namespace fhqr {

// ---------------------------------------------------------------------------
// Quantizer

/// Uniform symmetric quantizer applied separately to real and imaginary parts.
struct QuantizerSpec {
  unsigned bits_per_component = 15;

  void validate() const;
  std::int32_t max_code() const noexcept { return (std::int32_t{1} << (bits_per_component - 1)) - 1; }
  unsigned bits_per_sample() const noexcept { return 2 * bits_per_component; }
};

/// Integer codes of one matrix, real then imaginary per sample, row-major.
struct QuantizedMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  /// Max-abs component, rounded up to float so the stream carries it exactly.
  float scale = 0.0f;
  std::vector<std::int32_t> codes;

  friend bool operator==(const QuantizedMatrix&, const QuantizedMatrix&) = default;
};

/// Step between adjacent reconstruction levels.
double quantizer_step(float scale, const QuantizerSpec& spec);
QuantizedMatrix quantize(const IQMatrix& m, const QuantizerSpec& spec);
IQMatrix dequantize(const QuantizedMatrix& q, const QuantizerSpec& spec);

// ---------------------------------------------------------------------------
// Compression-ratio accounting

struct UserShape {
  std::size_t n_f = 0;  // subcarriers
  std::size_t l_u = 0;  // truncation rank
};

struct CrReport {
  std::uint64_t b_org = 0;
  std::uint64_t b_cmp = 0;
  std::uint64_t b_ovh = 0;
  double cr = 0.0;
};

/// Index width for one antenna: log2(N_r), rounded up for non-powers of two.
unsigned antenna_index_bits(std::size_t n_r);

/// B_org = N N_r b_Q; B_cmp = sum L_u (N_f_u + N_r) b_Q; B_ovh = N_u N_r log2 N_r;
/// CR = B_org / (B_cmp + B_ovh). `b_q` is bits per complex sample.
CrReport compression_ratio(std::size_t n, std::size_t n_r, unsigned b_q, std::span<const UserShape> users);

// ---------------------------------------------------------------------------
// QR payload

inline constexpr std::uint16_t kPayloadVersion = 1;

struct PayloadHeader {
  std::uint16_t version = kPayloadVersion;
  std::uint32_t n_samples = 0;  // N, time samples per block (CP included)
  std::uint32_t n_r = 0;
  std::uint32_t n_fft = 0;
  std::uint32_t cp_len = 0;
  std::uint32_t b_q = 0;  // bits per complex sample
  std::uint32_t n_users = 0;

  friend bool operator==(const PayloadHeader&, const PayloadHeader&) = default;
};

struct UserRecord {
  std::uint16_t user_id = 0;
  std::uint32_t n_f = 0;
  std::uint16_t l_u = 0;
  std::vector<std::uint32_t> perm;  // N_r antenna indices, basis antennas first
  QuantizedMatrix q;                // N_f x L_u
  QuantizedMatrix r;                // L_u x N_r, columns in perm order

  friend bool operator==(const UserRecord&, const UserRecord&) = default;
};

struct CompressedPayload {
  PayloadHeader header;
  std::vector<UserRecord> users;

  QuantizerSpec quantizer() const;
  friend bool operator==(const CompressedPayload&, const CompressedPayload&) = default;
};

/// Bit budget of a serialized payload, split by role.
struct PayloadLayout {
  std::uint64_t header_bits = 0;       // magic + version + six u32 fields
  std::uint64_t user_fixed_bits = 0;   // user_id, N_f_u, L_u per user
  std::uint64_t scale_bits = 0;        // two f32 scales per user
  std::uint64_t b_cmp = 0;             // quantized Q and R components
  std::uint64_t b_ovh = 0;             // antenna indices
  std::uint64_t padding_bits = 0;      // byte alignment after each user record

  std::uint64_t total_bits() const noexcept {
    return header_bits + user_fixed_bits + scale_bits + b_cmp + b_ovh + padding_bits;
  }
};

PayloadLayout payload_layout(const PayloadHeader& header, std::span<const UserShape> users);

std::vector<std::uint8_t> serialize(const CompressedPayload& p);
/// Throws DecodeError on bad magic, unsupported version, truncation or trailing bytes.
CompressedPayload deserialize(std::span<const std::uint8_t> bytes);

// ---------------------------------------------------------------------------
// QR compressor / decompressor

struct UserDiagnostics {
  std::uint16_t user_id = 0;
  /// Fraction of Y_u energy outside span(Q_u), before quantization.
  double residual_energy_fraction = 0.0;
  /// Basis steps that were numerically dependent and got synthetic vectors.
  std::vector<std::size_t> completed_steps;
};

struct QrCompression {
  CompressedPayload payload;
  std::vector<UserDiagnostics> diagnostics;
  std::vector<std::string> warnings;
};

/// RRH side: CP removal, DFT, RE demapping, per-user pivoted QR, quantization.
/// `l_u` holds one rank per allocation.
QrCompression compress_qr_detailed(const IQMatrix& y, std::span<const UserAllocation> allocations,
                                   std::span<const std::size_t> l_u, const QuantizerSpec& quant,
                                   const GridConfig& grid);
CompressedPayload compress_qr(const IQMatrix& y, std::span<const UserAllocation> allocations,
                              std::span<const std::size_t> l_u, const QuantizerSpec& quant,
                              const GridConfig& grid);

/// Per-user frequency-domain compression of already demapped Y_u matrices.
UserRecord compress_user(const IQMatrix& y_u, std::uint16_t user_id, std::size_t l_u,
                         const QuantizerSpec& quant, UserDiagnostics* diagnostics = nullptr);

struct UserMatrix {
  std::uint16_t user_id = 0;
  IQMatrix y;  // N_f_u x N_r, original antenna order
};

/// BBU side: dequantize and form Q_u R_u in original antenna order.
std::vector<UserMatrix> decompress(const CompressedPayload& p);
IQMatrix decompress_user(const UserRecord& rec, const QuantizerSpec& quant);

// ---------------------------------------------------------------------------
// SVD baseline on the time-domain block

/// Largest per-component width b with k (N + N_r) 2 b <= target_bits.
/// Throws InfeasibleBudget when b would fall below 2.
unsigned svd_bits_for_budget(std::size_t n, std::size_t n_r, std::size_t k, std::uint64_t target_bits);

struct SvdPayload {
  std::uint32_t n_samples = 0;
  std::uint32_t n_r = 0;
  std::uint32_t k = 0;
  std::uint32_t bits_per_component = 0;
  QuantizedMatrix us;  // U diag(s), N x k
  QuantizedMatrix v;   // V, N_r x k

  /// Quantized sample bits, k (N + N_r) 2 b.
  std::uint64_t sample_bits() const noexcept;
  friend bool operator==(const SvdPayload&, const SvdPayload&) = default;
};

SvdPayload compress_svd_baseline(const IQMatrix& y, std::size_t rank_k, std::uint64_t target_bits);
IQMatrix decompress_svd(const SvdPayload& p);
std::vector<std::uint8_t> serialize_svd(const SvdPayload& p);
SvdPayload deserialize_svd(std::span<const std::uint8_t> bytes);

}  // namespace fhqr
