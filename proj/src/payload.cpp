#include <array>
#include <string>

#include "fhqr/bitstream.hpp"
#include "fhqr/codec.hpp"
#include "fhqr/error.hpp"

namespace fhqr {

namespace {

constexpr std::array<char, 4> kQrMagic = {'Q', 'R', 'F', 'H'};
constexpr std::array<char, 4> kSvdMagic = {'S', 'V', 'F', 'H'};
constexpr std::uint64_t kHeaderBits = 32 + 16 + 6 * 32;
constexpr std::uint64_t kUserFixedBits = 16 + 32 + 16;
constexpr std::uint64_t kScaleBits = 2 * 32;

void write_magic(BitWriter& w, const std::array<char, 4>& magic) {
  for (char c : magic) w.write(static_cast<std::uint8_t>(c), 8);
}

void expect_magic(BitReader& r, const std::array<char, 4>& magic) {
  for (char c : magic) {
    const std::size_t at = r.position();
    if (r.read(8) != static_cast<std::uint8_t>(c)) {
      throw DecodeError(at, std::string("bad magic, expected \"") + std::string(magic.begin(), magic.end()) + "\"");
    }
  }
}

void write_codes(BitWriter& w, const QuantizedMatrix& m, unsigned width) {
  for (auto c : m.codes) w.write_signed(c, width);
}

QuantizedMatrix read_codes(BitReader& r, std::size_t rows, std::size_t cols, float scale, unsigned width) {
  const std::size_t count = 2 * rows * cols;
  if (count * width > r.remaining()) {
    throw DecodeError(r.position(), "truncated stream: matrix of " + std::to_string(rows) + "x" +
                                        std::to_string(cols) + " does not fit");
  }
  QuantizedMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.scale = scale;
  m.codes.resize(count);
  for (auto& c : m.codes) c = static_cast<std::int32_t>(r.read_signed(width));
  return m;
}

void require_shape(const QuantizedMatrix& m, std::size_t rows, std::size_t cols, const char* what) {
  if (m.rows != rows || m.cols != cols || m.codes.size() != 2 * rows * cols) {
    throw InvalidInput(std::string("serialize: ") + what + " has inconsistent dimensions");
  }
}

void require_end(BitReader& r) {
  if (r.remaining() != 0) throw DecodeError(r.position(), "trailing bytes after last record");
}

}  // namespace

QuantizerSpec CompressedPayload::quantizer() const {
  QuantizerSpec q{header.b_q / 2};
  if (header.b_q % 2 != 0) throw InvalidInput("payload b_Q must be even");
  q.validate();
  return q;
}

PayloadLayout payload_layout(const PayloadHeader& header, std::span<const UserShape> users) {
  PayloadLayout l;
  l.header_bits = kHeaderBits;
  const unsigned idx_bits = antenna_index_bits(header.n_r);
  for (const auto& u : users) {
    const std::uint64_t ovh = static_cast<std::uint64_t>(header.n_r) * idx_bits;
    const std::uint64_t cmp = static_cast<std::uint64_t>(u.l_u) * (u.n_f + header.n_r) * header.b_q;
    const std::uint64_t record = kUserFixedBits + ovh + kScaleBits + cmp;
    l.user_fixed_bits += kUserFixedBits;
    l.scale_bits += kScaleBits;
    l.b_ovh += ovh;
    l.b_cmp += cmp;
    l.padding_bits += (8 - record % 8) % 8;
  }
  return l;
}

std::vector<std::uint8_t> serialize(const CompressedPayload& p) {
  const QuantizerSpec quant = p.quantizer();
  const unsigned width = quant.bits_per_component;
  if (p.header.n_users != p.users.size()) throw InvalidInput("serialize: user count mismatch");
  const unsigned idx_bits = antenna_index_bits(p.header.n_r);

  BitWriter w;
  write_magic(w, kQrMagic);
  w.write(p.header.version, 16);
  for (auto v : {p.header.n_samples, p.header.n_r, p.header.n_fft, p.header.cp_len, p.header.b_q,
                 p.header.n_users}) {
    w.write(v, 32);
  }
  for (const auto& u : p.users) {
    if (u.perm.size() != p.header.n_r) throw InvalidInput("serialize: permutation length mismatch");
    require_shape(u.q, u.n_f, u.l_u, "Q");
    require_shape(u.r, u.l_u, p.header.n_r, "R");
    w.write(u.user_id, 16);
    w.write(u.n_f, 32);
    w.write(u.l_u, 16);
    for (auto idx : u.perm) w.write(idx, idx_bits);
    w.write_f32(u.q.scale);
    w.write_f32(u.r.scale);
    write_codes(w, u.q, width);
    write_codes(w, u.r, width);
    w.align_to_byte();
  }
  return std::move(w).take();
}

CompressedPayload deserialize(std::span<const std::uint8_t> bytes) {
  BitReader r(bytes);
  expect_magic(r, kQrMagic);
  CompressedPayload p;
  const std::size_t version_at = r.position();
  p.header.version = static_cast<std::uint16_t>(r.read(16));
  if (p.header.version != kPayloadVersion) {
    throw DecodeError(version_at, "unsupported payload version " + std::to_string(p.header.version));
  }
  p.header.n_samples = static_cast<std::uint32_t>(r.read(32));
  const std::size_t n_r_at = r.position();
  p.header.n_r = static_cast<std::uint32_t>(r.read(32));
  p.header.n_fft = static_cast<std::uint32_t>(r.read(32));
  p.header.cp_len = static_cast<std::uint32_t>(r.read(32));
  const std::size_t bq_at = r.position();
  p.header.b_q = static_cast<std::uint32_t>(r.read(32));
  p.header.n_users = static_cast<std::uint32_t>(r.read(32));
  if (p.header.n_r == 0) throw DecodeError(n_r_at, "header declares zero antennas");
  QuantizerSpec quant;
  try {
    quant = p.quantizer();
  } catch (const InvalidInput&) {
    throw DecodeError(bq_at, "invalid b_Q " + std::to_string(p.header.b_q));
  }
  const unsigned width = quant.bits_per_component;
  const unsigned idx_bits = antenna_index_bits(p.header.n_r);

  for (std::uint32_t i = 0; i < p.header.n_users; ++i) {
    UserRecord u;
    const std::size_t record_at = r.position();
    u.user_id = static_cast<std::uint16_t>(r.read(16));
    u.n_f = static_cast<std::uint32_t>(r.read(32));
    u.l_u = static_cast<std::uint16_t>(r.read(16));
    if (u.n_f == 0 || u.l_u == 0 || u.l_u > p.header.n_r || u.l_u > u.n_f) {
      throw DecodeError(record_at, "user record " + std::to_string(i) + " has invalid dimensions");
    }
    if (static_cast<std::uint64_t>(p.header.n_r) * idx_bits > r.remaining()) {
      throw DecodeError(r.position(), "truncated stream in antenna indices");
    }
    std::vector<bool> seen(p.header.n_r, false);
    u.perm.resize(p.header.n_r);
    for (auto& idx : u.perm) {
      const std::size_t at = r.position();
      idx = static_cast<std::uint32_t>(r.read(idx_bits));
      if (idx >= p.header.n_r || seen[idx]) throw DecodeError(at, "antenna indices are not a permutation");
      seen[idx] = true;
    }
    const float q_scale = r.read_f32();
    const float r_scale = r.read_f32();
    u.q = read_codes(r, u.n_f, u.l_u, q_scale, width);
    u.r = read_codes(r, u.l_u, p.header.n_r, r_scale, width);
    r.align_to_byte();
    p.users.push_back(std::move(u));
  }
  require_end(r);
  return p;
}

std::uint64_t SvdPayload::sample_bits() const noexcept {
  return static_cast<std::uint64_t>(k) * (n_samples + n_r) * 2 * bits_per_component;
}

std::vector<std::uint8_t> serialize_svd(const SvdPayload& p) {
  QuantizerSpec{p.bits_per_component}.validate();
  require_shape(p.us, p.n_samples, p.k, "U*S");
  require_shape(p.v, p.n_r, p.k, "V");
  BitWriter w;
  write_magic(w, kSvdMagic);
  w.write(kPayloadVersion, 16);
  for (auto v : {p.n_samples, p.n_r, p.k, p.bits_per_component}) w.write(v, 32);
  w.write_f32(p.us.scale);
  w.write_f32(p.v.scale);
  write_codes(w, p.us, p.bits_per_component);
  write_codes(w, p.v, p.bits_per_component);
  w.align_to_byte();
  return std::move(w).take();
}

SvdPayload deserialize_svd(std::span<const std::uint8_t> bytes) {
  BitReader r(bytes);
  expect_magic(r, kSvdMagic);
  const std::size_t version_at = r.position();
  const auto version = r.read(16);
  if (version != kPayloadVersion) throw DecodeError(version_at, "unsupported payload version " + std::to_string(version));
  SvdPayload p;
  const std::size_t dims_at = r.position();
  p.n_samples = static_cast<std::uint32_t>(r.read(32));
  p.n_r = static_cast<std::uint32_t>(r.read(32));
  p.k = static_cast<std::uint32_t>(r.read(32));
  p.bits_per_component = static_cast<std::uint32_t>(r.read(32));
  if (p.n_samples == 0 || p.n_r == 0 || p.k == 0 || p.k > p.n_samples || p.k > p.n_r ||
      p.bits_per_component < 2 || p.bits_per_component > 16) {
    throw DecodeError(dims_at, "invalid SVD payload dimensions");
  }
  const float us_scale = r.read_f32();
  const float v_scale = r.read_f32();
  p.us = read_codes(r, p.n_samples, p.k, us_scale, p.bits_per_component);
  p.v = read_codes(r, p.n_r, p.k, v_scale, p.bits_per_component);
  r.align_to_byte();
  require_end(r);
  return p;
}

}  // namespace fhqr
