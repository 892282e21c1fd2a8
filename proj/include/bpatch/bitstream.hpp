#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bpatch {

// Widest field a single read or write may carry.
inline constexpr unsigned kMaxFieldWidth = 32;

// Appends fields MSB-first. Fields straddle byte boundaries freely; the
// final partial byte is zero-padded by finalize().
class BitWriter {
 public:
  BitWriter() = default;

  // Throws Errc::encoding_range if value does not fit in width bits or
  // width exceeds kMaxFieldWidth.
  void write(std::uint32_t value, unsigned width);

  // Appends whole bytes (8-bit fields), whatever the current alignment.
  void write_bytes(std::span<const std::uint8_t> bytes);

  std::uint64_t bit_position() const noexcept { return bit_position_; }

  std::vector<std::uint8_t> finalize() &&;

 private:
  std::vector<std::uint8_t> buffer_;
  std::uint64_t bit_position_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> source) noexcept : source_(source) {}

  // Throws Errc::truncated_stream if fewer than width bits remain.
  std::uint32_t read(unsigned width);

  // Reads out.size() 8-bit fields.
  void read_bytes(std::span<std::uint8_t> out);

  std::uint64_t bit_position() const noexcept { return bit_position_; }
  std::uint64_t bits_remaining() const noexcept { return 8 * std::uint64_t{source_.size()} - bit_position_; }

 private:
  std::span<const std::uint8_t> source_;
  std::uint64_t bit_position_ = 0;
};

// Number of significant bits in value; bit_width(0) == 0.
constexpr unsigned bit_width(std::uint64_t value) noexcept {
  unsigned width = 0;
  while (value != 0) {
    ++width;
    value >>= 1;
  }
  return width;
}

}  // namespace bpatch
