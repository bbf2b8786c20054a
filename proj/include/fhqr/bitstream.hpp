#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fhqr {

// Bits are packed LSB-first: bit i of the stream is bit (i % 8) of byte i / 8,
// and every field is written least-significant bit first.
class BitWriter {
 public:
  void write(std::uint64_t value, unsigned width);
  void write_signed(std::int64_t value, unsigned width);  // two's complement
  void write_f32(float value);
  void align_to_byte();

  std::size_t bit_size() const noexcept { return bits_; }
  const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }
  std::vector<std::uint8_t> take() && { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t bits_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  /// Throws DecodeError when the stream runs out.
  std::uint64_t read(unsigned width);
  std::int64_t read_signed(unsigned width);
  float read_f32();
  void align_to_byte();

  std::size_t position() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return bytes_.size() * 8 - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace fhqr
