#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bpatch {

// Exclusive upper bound on either input size, in bytes.
inline constexpr std::size_t kMaxImageBytes = std::size_t{1} << 24;

// One COPY/ADD pair: skip `discard` old bytes, copy `copy` old bytes to the
// output, then append `literals`.
struct EditTriple {
  std::uint32_t discard = 0;
  std::uint32_t copy = 0;
  std::vector<std::uint8_t> literals;

  friend bool operator==(const EditTriple&, const EditTriple&) = default;
};

// Canonical form:
//   - no triple is a pure skip (copy == 0 && literals empty)
//   - only the first triple may have copy == 0; when it does, the second
//     triple has discard == 0
//   - a triple without literals is followed by one with discard > 0
//   - old bytes past the last copy are implicitly discarded
struct EditScript {
  std::vector<EditTriple> triples;
  std::size_t old_len = 0;
  std::size_t new_len = 0;

  friend bool operator==(const EditScript&, const EditScript&) = default;
};

struct DiffMode {
  enum class Kind { minimal, fast };

  static constexpr std::uint32_t kDefaultCutoff = 1024;

  Kind kind = Kind::minimal;
  // Edit cost beyond which a fast-mode split gives up on optimality.
  std::uint32_t cutoff = kDefaultCutoff;

  static constexpr DiffMode minimal() noexcept { return {Kind::minimal, 0}; }
  static constexpr DiffMode fast(std::uint32_t cutoff = kDefaultCutoff) noexcept { return {Kind::fast, cutoff}; }

  friend bool operator==(const DiffMode&, const DiffMode&) = default;
};

EditScript compute_edit_script(std::span<const std::uint8_t> old_bytes, std::span<const std::uint8_t> new_bytes,
                               DiffMode mode);

// Brings an arbitrary triple sequence into canonical form without changing
// what it produces. Throws Errc::malformed_script if the triples read past
// old_len or do not produce new_len bytes.
EditScript canonicalize(std::vector<EditTriple> triples, std::size_t old_len, std::size_t new_len);

bool is_canonical(const EditScript& script) noexcept;

std::vector<std::uint8_t> apply_script(std::span<const std::uint8_t> old_bytes, const EditScript& script);

struct ScriptCost {
  std::size_t deleted = 0;
  std::size_t inserted = 0;

  std::size_t total() const noexcept { return deleted + inserted; }
  friend bool operator==(const ScriptCost&, const ScriptCost&) = default;
};

ScriptCost script_cost(const EditScript& script) noexcept;

namespace detail {

// Exact split point for the subproblem old[x0,x1) x new[y0,y1): returns the
// column y such that some optimal alignment passes through (mid, y), where
// mid = (x0 + x1) / 2. Uses bit-parallel LCS rows.
std::size_t lcs_split_column(std::span<const std::uint8_t> old_bytes, std::span<const std::uint8_t> new_bytes,
                             std::size_t x0, std::size_t x1, std::size_t y0, std::size_t y1);

// Bit-parallel LCS length, exposed for tests.
std::size_t lcs_length(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

}  // namespace detail

}  // namespace bpatch
