#include "bpatch/bitstream.hpp"

#include <string>

#include "bpatch/error.hpp"

namespace bpatch {

void BitWriter::write(std::uint32_t value, unsigned width) {
  if (width > kMaxFieldWidth) {
    throw Error(Errc::encoding_range, "field width " + std::to_string(width) + " exceeds 32 bits");
  }
  if (width < 32 && (std::uint64_t{value} >> width) != 0) {
    throw Error(Errc::encoding_range,
                "value " + std::to_string(value) + " does not fit in " + std::to_string(width) + " bits");
  }
  unsigned remaining = width;
  while (remaining > 0) {
    const unsigned offset = static_cast<unsigned>(bit_position_ & 7);
    if (offset == 0) buffer_.push_back(0);
    const unsigned room = 8 - offset;
    const unsigned take = remaining < room ? remaining : room;
    const std::uint32_t chunk = (value >> (remaining - take)) & ((1u << take) - 1);
    buffer_.back() |= static_cast<std::uint8_t>(chunk << (room - take));
    remaining -= take;
    bit_position_ += take;
  }
}

void BitWriter::write_bytes(std::span<const std::uint8_t> bytes) {
  if ((bit_position_ & 7) == 0) {
    buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());
    bit_position_ += 8 * std::uint64_t{bytes.size()};
    return;
  }
  for (std::uint8_t b : bytes) write(b, 8);
}

std::vector<std::uint8_t> BitWriter::finalize() && {
  bit_position_ = 0;
  return std::move(buffer_);
}

std::uint32_t BitReader::read(unsigned width) {
  if (width > kMaxFieldWidth) {
    throw Error(Errc::encoding_range, "field width " + std::to_string(width) + " exceeds 32 bits");
  }
  if (width > bits_remaining()) {
    throw Error(Errc::truncated_stream, "stream ends " + std::to_string(bits_remaining()) +
                                            " bits short of a " + std::to_string(width) + "-bit field");
  }
  std::uint64_t value = 0;
  unsigned remaining = width;
  while (remaining > 0) {
    const unsigned offset = static_cast<unsigned>(bit_position_ & 7);
    const unsigned room = 8 - offset;
    const unsigned take = remaining < room ? remaining : room;
    const unsigned byte = source_[bit_position_ >> 3];
    const unsigned chunk = (byte >> (room - take)) & ((1u << take) - 1);
    value = (value << take) | chunk;
    remaining -= take;
    bit_position_ += take;
  }
  return static_cast<std::uint32_t>(value);
}

void BitReader::read_bytes(std::span<std::uint8_t> out) {
  if (8 * std::uint64_t{out.size()} > bits_remaining()) {
    throw Error(Errc::truncated_stream, "stream ends inside a literal run");
  }
  const unsigned offset = static_cast<unsigned>(bit_position_ & 7);
  std::size_t at = bit_position_ >> 3;
  if (offset == 0) {
    for (auto& b : out) b = source_[at++];
  } else {
    for (auto& b : out) {
      b = static_cast<std::uint8_t>((source_[at] << offset) | (source_[at + 1] >> (8 - offset)));
      ++at;
    }
  }
  bit_position_ += 8 * std::uint64_t{out.size()};
}

}  // namespace bpatch
