#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fhqr/codec.hpp"
#include "fhqr/error.hpp"

namespace fhqr {

void QuantizerSpec::validate() const {
  if (bits_per_component < 2 || bits_per_component > 16) {
    throw InvalidInput("quantizer bits per component must lie in [2, 16], got " +
                       std::to_string(bits_per_component));
  }
}

double quantizer_step(float scale, const QuantizerSpec& spec) {
  return static_cast<double>(scale) / static_cast<double>(spec.max_code());
}

QuantizedMatrix quantize(const IQMatrix& m, const QuantizerSpec& spec) {
  spec.validate();
  if (m.empty() || !m.all_finite()) throw InvalidInput("quantize: empty or non-finite matrix");

  double peak = 0.0;
  for (const auto& v : m.data()) peak = std::max({peak, std::abs(v.real()), std::abs(v.imag())});
  if (peak > std::numeric_limits<float>::max()) throw InvalidInput("quantize: dynamic range exceeds f32 scale");

  QuantizedMatrix q;
  q.rows = m.rows();
  q.cols = m.cols();
  q.codes.assign(2 * m.size(), 0);
  float scale = static_cast<float>(peak);
  if (static_cast<double>(scale) < peak) scale = std::nextafter(scale, std::numeric_limits<float>::infinity());
  q.scale = scale;
  if (scale == 0.0f) return q;

  const double step = quantizer_step(scale, spec);
  const std::int64_t lim = spec.max_code();
  auto code = [&](double x) {
    return static_cast<std::int32_t>(std::clamp<std::int64_t>(std::llround(x / step), -lim, lim));
  };
  auto src = m.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    q.codes[2 * i] = code(src[i].real());
    q.codes[2 * i + 1] = code(src[i].imag());
  }
  return q;
}

IQMatrix dequantize(const QuantizedMatrix& q, const QuantizerSpec& spec) {
  spec.validate();
  if (q.codes.size() != 2 * q.rows * q.cols) throw InvalidInput("dequantize: code count mismatch");
  IQMatrix m(q.rows, q.cols);
  const double step = quantizer_step(q.scale, spec);
  auto dst = m.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = cplx(q.codes[2 * i] * step, q.codes[2 * i + 1] * step);
  }
  return m;
}

unsigned antenna_index_bits(std::size_t n_r) {
  if (n_r == 0) throw InvalidInput("antenna_index_bits: n_r must be positive");
  unsigned bits = 0;
  while ((std::size_t{1} << bits) < n_r) ++bits;
  return bits;
}

CrReport compression_ratio(std::size_t n, std::size_t n_r, unsigned b_q, std::span<const UserShape> users) {
  if (n == 0 || n_r == 0 || b_q == 0 || users.empty()) {
    throw InvalidInput("compression_ratio: all arguments must be positive");
  }
  CrReport rep;
  rep.b_org = static_cast<std::uint64_t>(n) * n_r * b_q;
  for (const auto& u : users) {
    if (u.n_f == 0 || u.l_u == 0) throw InvalidInput("compression_ratio: user with zero N_f or L_u");
    rep.b_cmp += static_cast<std::uint64_t>(u.l_u) * (u.n_f + n_r) * b_q;
  }
  rep.b_ovh = static_cast<std::uint64_t>(users.size()) * n_r * antenna_index_bits(n_r);
  rep.cr = static_cast<double>(rep.b_org) / static_cast<double>(rep.b_cmp + rep.b_ovh);
  return rep;
}

}  // namespace fhqr
