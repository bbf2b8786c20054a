#include "fhqr/bitstream.hpp"

#include <bit>
#include <string>

#include "fhqr/error.hpp"

namespace fhqr {

void BitWriter::write(std::uint64_t value, unsigned width) {
  for (unsigned i = 0; i < width; ++i) {
    if (bits_ % 8 == 0) bytes_.push_back(0);
    if ((value >> i) & 1U) bytes_.back() |= static_cast<std::uint8_t>(1U << (bits_ % 8));
    ++bits_;
  }
}

void BitWriter::write_signed(std::int64_t value, unsigned width) {
  write(static_cast<std::uint64_t>(value), width);
}

void BitWriter::write_f32(float value) { write(std::bit_cast<std::uint32_t>(value), 32); }

void BitWriter::align_to_byte() { bits_ = bytes_.size() * 8; }

std::uint64_t BitReader::read(unsigned width) {
  if (width > remaining()) {
    throw DecodeError(pos_, "truncated stream: need " + std::to_string(width) + " bits, " +
                                std::to_string(remaining()) + " left");
  }
  std::uint64_t v = 0;
  for (unsigned i = 0; i < width; ++i, ++pos_) {
    if ((bytes_[pos_ / 8] >> (pos_ % 8)) & 1U) v |= std::uint64_t{1} << i;
  }
  return v;
}

std::int64_t BitReader::read_signed(unsigned width) {
  std::uint64_t v = read(width);
  if (width < 64 && (v >> (width - 1)) & 1U) v |= ~std::uint64_t{0} << width;
  return static_cast<std::int64_t>(v);
}

float BitReader::read_f32() { return std::bit_cast<float>(static_cast<std::uint32_t>(read(32))); }

void BitReader::align_to_byte() { pos_ = (pos_ + 7) / 8 * 8; }

}  // namespace fhqr
