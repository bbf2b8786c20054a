#include <doctest.h>

#include <cmath>
#include <random>

#include "fhqr/bitstream.hpp"
#include "fhqr/codec.hpp"
#include "fhqr/config.hpp"
#include "fhqr/error.hpp"
#include "fhqr/linalg.hpp"
#include "support.hpp"

using namespace fhqr;
using testing::random_matrix;
using testing::random_rank;

namespace {

// Payload size from the documented layout: 30-byte header, then per user
// 64 fixed bits, N_r indices, two f32 scales and the codes, padded to a byte.
std::uint64_t expected_payload_bits(std::size_t n_r, unsigned bpc, const std::vector<UserShape>& users) {
  unsigned idx = 0;
  while ((std::size_t{1} << idx) < n_r) ++idx;
  std::uint64_t bits = 240;
  for (const auto& u : users) {
    const std::uint64_t rec = 64 + n_r * idx + 64 + 2ull * bpc * u.l_u * (u.n_f + n_r);
    bits += (rec + 7) / 8 * 8;
  }
  return bits;
}

std::vector<std::uint8_t> payload_bytes(std::size_t n_f, std::size_t n_r, std::size_t l, unsigned bpc, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  CompressedPayload p;
  p.header.n_samples = static_cast<std::uint32_t>(n_f);
  p.header.n_r = static_cast<std::uint32_t>(n_r);
  p.header.b_q = 2 * bpc;
  p.header.n_users = 1;
  p.users.push_back(compress_user(random_matrix(n_f, n_r, rng), 3, l, QuantizerSpec{bpc}));
  return serialize(p);
}

}  // namespace

TEST_CASE("bit writer packs LSB first") {
  BitWriter w;
  w.write(0b101, 3);
  w.write(0xF, 4);
  w.write(1, 1);
  w.write(0x1234, 16);
  w.write_signed(-2, 5);
  CHECK(w.bit_size() == 29);
  w.align_to_byte();
  const auto& b = w.bytes();
  REQUIRE(b.size() == 4);
  CHECK(b[0] == 0xFD);
  CHECK(b[1] == 0x34);
  CHECK(b[2] == 0x12);
  CHECK(b[3] == 0x1E);

  BitReader r(b);
  CHECK(r.read(3) == 0b101);
  CHECK(r.read(4) == 0xF);
  CHECK(r.read(1) == 1);
  CHECK(r.read(16) == 0x1234);
  CHECK(r.read_signed(5) == -2);
  r.align_to_byte();
  CHECK(r.remaining() == 0);
  CHECK_THROWS_AS(r.read(1), DecodeError);
}

TEST_CASE("f32 fields are IEEE-754 little endian") {
  BitWriter w;
  w.write_f32(1.0f);
  CHECK(w.bytes() == std::vector<std::uint8_t>{0x00, 0x00, 0x80, 0x3F});
  BitReader r(w.bytes());
  CHECK(r.read_f32() == 1.0f);
}

TEST_CASE("quantizer error stays within half a step") {
  std::mt19937_64 rng(51);
  for (unsigned b : {2u, 4u, 8u, 15u, 16u}) {
    const QuantizerSpec spec{b};
    const IQMatrix m = random_matrix(17, 9, rng);
    const QuantizedMatrix q = quantize(m, spec);
    double peak = 0.0;
    for (auto v : m.data()) peak = std::max({peak, std::abs(v.real()), std::abs(v.imag())});
    CHECK(double(q.scale) >= peak);
    CHECK(double(q.scale) <= peak * (1 + 1e-6));
    const double step = quantizer_step(q.scale, spec);
    CHECK(step == doctest::Approx(double(q.scale) / ((1 << (b - 1)) - 1)));
    const IQMatrix back = dequantize(q, spec);
    for (std::size_t i = 0; i < m.size(); ++i) {
      CHECK(std::abs(back.data()[i].real() - m.data()[i].real()) <= step / 2 * (1 + 1e-9));
      CHECK(std::abs(back.data()[i].imag() - m.data()[i].imag()) <= step / 2 * (1 + 1e-9));
    }
    for (auto c : q.codes) CHECK(std::abs(c) <= spec.max_code());
  }
  CHECK_THROWS_AS(QuantizerSpec{1}.validate(), InvalidInput);
  CHECK_THROWS_AS(QuantizerSpec{17}.validate(), InvalidInput);
}

TEST_CASE("quantizer handles an all-zero matrix") {
  const QuantizedMatrix q = quantize(IQMatrix(2, 2), QuantizerSpec{15});
  CHECK(q.scale == 0.0f);
  CHECK(dequantize(q, QuantizerSpec{15}) == IQMatrix(2, 2));
}

TEST_CASE("compression ratio of the reference scenarios") {
  // Independent arithmetic: N = 4384, N_r = 256, 30 bits per complex sample, 8-bit indices.
  auto oracle = [](const std::vector<std::size_t>& rbs, double l) {
    const double b_org = 4384.0 * 256 * 30;
    double b_cmp = 0.0;
    for (auto rb : rbs) b_cmp += l * (12.0 * rb + 256) * 30;
    const double b_ovh = double(rbs.size()) * 256 * 8;
    return b_org / (b_cmp + b_ovh);
  };
  for (std::size_t users : {8u, 12u}) {
    const auto rbs = reference_rb_counts(users);
    for (std::size_t l : {12u, 24u}) {
      std::vector<UserShape> shapes;
      for (auto rb : rbs) shapes.push_back({rb * 12, l});
      const CrReport r = compression_ratio(4384, 256, 30, shapes);
      CHECK(r.cr == doctest::Approx(oracle(rbs, double(l))).epsilon(1e-12));
    }
  }
  std::vector<UserShape> eight;
  for (auto rb : reference_rb_counts(8)) eight.push_back({rb * 12, 24});
  const CrReport r = compression_ratio(4384, 256, 30, eight);
  CHECK(r.b_org == 33669120);
  CHECK(r.b_cmp == 3755520);
  CHECK(r.b_ovh == 16384);
  CHECK(r.b_cmp + r.b_ovh == 3771904);
  CHECK(r.cr == doctest::Approx(8.926).epsilon(1e-3));

  CHECK(antenna_index_bits(256) == 8);
  CHECK(antenna_index_bits(64) == 6);
  CHECK(antenna_index_bits(100) == 7);
  CHECK(antenna_index_bits(1) == 0);
}

TEST_CASE("reference RB allocations") {
  const auto eight = reference_rb_counts(8);
  CHECK(eight == std::vector<std::size_t>{26, 28, 30, 32, 34, 36, 38, 40});
  std::size_t sum = 0;
  for (auto v : eight) sum += v;
  CHECK(sum == 264);
  sum = 0;
  for (auto v : reference_rb_counts(12)) sum += v;
  CHECK(sum == 252);
  const auto alloc = allocate_reference_rbs(12);
  for (std::size_t u = 1; u < alloc.size(); ++u) CHECK(alloc[u].rb_start == alloc[u - 1].rb_start + alloc[u - 1].rb_count);
  CHECK_THROWS_AS(reference_rb_counts(10), InvalidInput);
}

TEST_CASE("payload length follows the documented layout") {
  CHECK(payload_bytes(96, 64, 11, 15, 1).size() * 8 == expected_payload_bits(64, 15, {{96, 11}}));
  CHECK(payload_bytes(13, 5, 2, 7, 2).size() * 8 == expected_payload_bits(5, 7, {{13, 2}}));
  PayloadHeader h;
  h.n_r = 64;
  h.b_q = 30;
  h.n_users = 1;
  const std::vector<UserShape> shapes{{96, 11}};
  const PayloadLayout layout = payload_layout(h, shapes);
  CHECK(layout.total_bits() == expected_payload_bits(64, 15, shapes));
  CHECK(layout.b_cmp == 11u * (96 + 64) * 30);
  CHECK(layout.b_ovh == 64u * 6);
}

TEST_CASE("payload round trip and decode errors") {
  const auto bytes = payload_bytes(40, 16, 4, 12, 3);
  const CompressedPayload p = deserialize(bytes);
  CHECK(serialize(p) == bytes);
  CHECK(p.users.at(0).user_id == 3);

  auto truncated = bytes;
  truncated.pop_back();
  CHECK_THROWS_AS(deserialize(truncated), DecodeError);
  auto trailing = bytes;
  trailing.push_back(0);
  CHECK_THROWS_AS(deserialize(trailing), DecodeError);
  auto magic = bytes;
  magic[0] ^= 0xFF;
  CHECK_THROWS_AS(deserialize(magic), DecodeError);
  auto version = bytes;
  version[4] = 9;
  CHECK_THROWS_AS(deserialize(version), DecodeError);

  // Duplicate the first antenna index: the record is no longer a permutation.
  CompressedPayload bad = p;
  bad.users[0].perm[1] = bad.users[0].perm[0];
  CHECK_THROWS_AS(deserialize(serialize(bad)), DecodeError);
}

TEST_CASE("noiseless exact-rank input survives compression within the quantizer bound") {
  std::mt19937_64 rng(52);
  const IQMatrix y = random_rank(96, 64, 12, rng);
  const QuantizerSpec spec{15};
  const IQMatrix back = decompress_user(compress_user(y, 0, 12, spec), spec);
  CHECK(frobenius_error(y, back) < std::pow(2.0, -12));

  const IQMatrix full = random_matrix(30, 8, rng);
  const IQMatrix all = decompress_user(compress_user(full, 0, 8, spec), spec);
  CHECK(frobenius_error(full, all) < 1e-3);
}

TEST_CASE("L_u above the numerical rank completes the basis and warns") {
  std::mt19937_64 rng(53);
  const GridConfig g = GridConfig::centered(64, 8, 4);
  const std::vector<UserAllocation> alloc{{0, 0, 2}};
  IQMatrix y(g.symbol_length(), 6);  // all zeros
  y(10, 2) = 1.0;
  const std::vector<std::size_t> l{3};
  const QrCompression out = compress_qr_detailed(y, alloc, l, QuantizerSpec{15}, g);
  REQUIRE(out.diagnostics.size() == 1);
  CHECK(!out.diagnostics[0].completed_steps.empty());
  CHECK(out.warnings.size() == 1);
  CHECK_THROWS_AS(compress_user(random_matrix(10, 4, rng), 0, 5, QuantizerSpec{15}), InvalidInput);
}

TEST_CASE("SVD baseline bit budget") {
  CHECK(svd_bits_for_budget(4384, 256, 96, 3771904) == 4);
  CHECK(svd_bits_for_budget(10, 10, 1, 1000) == 16);
  CHECK(svd_bits_for_budget(4384, 256, 96, 3000000) == 3);
  CHECK_THROWS_AS(svd_bits_for_budget(4384, 256, 96, 1000000), InfeasibleBudget);
}

TEST_CASE("SVD baseline payload") {
  std::mt19937_64 rng(54);
  const IQMatrix y = random_rank(120, 16, 5, rng);
  const SvdPayload p = compress_svd_baseline(y, 5, 5ull * (120 + 16) * 2 * 12);
  CHECK(p.bits_per_component == 12);
  CHECK(p.sample_bits() == 5ull * (120 + 16) * 2 * 12);
  const auto bytes = serialize_svd(p);
  CHECK(bytes.size() == (4 * 8 + 16 + 4 * 32 + 64 + p.sample_bits() + 7) / 8);
  CHECK(deserialize_svd(bytes) == p);
  CHECK(frobenius_error(y, decompress_svd(p)) < 1e-2);
  auto cut = bytes;
  cut.resize(cut.size() - 3);
  CHECK_THROWS_AS(deserialize_svd(cut), DecodeError);
  CHECK_THROWS_AS(compress_svd_baseline(y, 17, 1u << 30), InvalidInput);
}
