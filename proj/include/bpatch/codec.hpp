#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bpatch/bitstream.hpp"
#include "bpatch/diff.hpp"

namespace bpatch {

inline constexpr std::size_t kHeaderBytes = 6;
// The body size travels in a 24-bit field.
inline constexpr std::uint64_t kBodyBitsLimit = std::uint64_t{1} << 24;
// Widest legal meta width: width(32) = 6.
inline constexpr unsigned kMaxMetaWidth = bit_width(kMaxFieldWidth);

struct PatchHeader {
  std::uint32_t body_bits = 0;
  std::uint8_t wnbd_meta = 0;
  std::uint8_t wnbc_meta = 0;
  std::uint8_t wnba_meta = 0;

  friend bool operator==(const PatchHeader&, const PatchHeader&) = default;
};

// Throws Errc::patch_too_large when the body would not fit the 24-bit size
// field; the caller should fall back to a full-image update.
PatchHeader compute_header(const EditScript& script);

std::vector<std::uint8_t> encode_patch(const EditScript& script);

struct DecodedPatch {
  PatchHeader header;
  std::vector<EditTriple> triples;
};

DecodedPatch decode_patch(std::span<const std::uint8_t> patch);

// Pull decoder over a complete patch. Validates framing (length, padding,
// meta widths) up front; each next() yields one COPY/ADD pair, after which
// the caller consumes exactly `literals` bytes with read_literals() or
// skip_literals(). Structural errors surface as Errc::malformed_patch.
class PatchDecoder {
 public:
  struct Opcode {
    std::uint32_t discard = 0;
    std::uint32_t copy = 0;
    std::uint32_t literals = 0;
  };

  explicit PatchDecoder(std::span<const std::uint8_t> patch);

  const PatchHeader& header() const noexcept { return header_; }

  std::optional<Opcode> next();

  // Reads the next out.size() literal bytes of the current opcode.
  void read_literals(std::span<std::uint8_t> out);
  void skip_literals();

  std::uint64_t opcode_count() const noexcept { return count_; }

 private:
  std::uint32_t read_field(unsigned meta, unsigned& width_seen, const char* name);
  void finish();

  BitReader reader_;
  PatchHeader header_;
  std::uint64_t body_start_ = 0;
  std::uint64_t count_ = 0;
  std::uint32_t literals_pending_ = 0;
  unsigned max_wnbd_ = 0, max_wnbc_ = 0, max_wnba_ = 0;
  bool prev_had_literals_ = false;
  bool first_was_pure_add_ = false;
  bool finished_ = false;
};

struct PatchInfo {
  PatchHeader header;
  std::uint64_t triples = 0;
  std::uint64_t discarded = 0;
  std::uint64_t copied = 0;
  std::uint64_t added = 0;
  std::uint64_t patch_bytes = 0;

  std::uint64_t output_bytes() const noexcept { return copied + added; }
  friend bool operator==(const PatchInfo&, const PatchInfo&) = default;
};

PatchInfo patch_info(std::span<const std::uint8_t> patch);

}  // namespace bpatch
