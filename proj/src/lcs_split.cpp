#include <algorithm>
#include <bit>
#include <cstdint>
#include <vector>

#include "bpatch/diff.hpp"

namespace bpatch::detail {

namespace {

using Word = std::uint64_t;

// Bit-parallel LCS row (Allison-Dix / Hyyro). Bit k of the state is 0 iff the
// LCS score rises between columns k and k+1 of the current row, so the score
// against the first j columns is the number of zero bits below j.
class LcsRow {
 public:
  explicit LcsRow(std::size_t columns)
      : columns_(columns), words_((columns + 63) / 64), match_(256 * words_, 0), state_(words_, ~Word{0}) {}

  template <typename ColumnAt>
  void set_columns(ColumnAt column_at) {
    std::fill(match_.begin(), match_.end(), 0);
    for (std::size_t k = 0; k < columns_; ++k) {
      match_[column_at(k) * words_ + k / 64] |= Word{1} << (k % 64);
    }
  }

  void advance(std::uint8_t symbol) {
    const Word* pm = match_.data() + symbol * words_;
    Word carry = 0;
    for (std::size_t w = 0; w < words_; ++w) {
      const Word v = state_[w];
      const Word u = v & pm[w];
      const Word t = v + carry;
      const Word c1 = t < carry ? 1 : 0;
      const Word sum = t + u;
      const Word c2 = sum < u ? 1 : 0;
      carry = c1 | c2;
      state_[w] = sum | (v & ~u);
    }
  }

  // scores[j] = LCS against the first j columns, j = 0..columns.
  void scores(std::vector<std::size_t>& out) const {
    out.assign(columns_ + 1, 0);
    std::size_t acc = 0;
    for (std::size_t k = 0; k < columns_; ++k) {
      acc += ((state_[k / 64] >> (k % 64)) & 1) == 0 ? 1 : 0;
      out[k + 1] = acc;
    }
  }

  std::size_t length() const {
    std::size_t ones = 0;
    for (std::size_t w = 0; w + 1 < words_; ++w) ones += static_cast<std::size_t>(std::popcount(state_[w]));
    if (words_ != 0) {
      const std::size_t tail = columns_ - 64 * (words_ - 1);
      const Word mask = tail == 64 ? ~Word{0} : ((Word{1} << tail) - 1);
      ones += static_cast<std::size_t>(std::popcount(state_[words_ - 1] & mask));
    }
    return columns_ - ones;
  }

 private:
  std::size_t columns_;
  std::size_t words_;
  std::vector<Word> match_;
  std::vector<Word> state_;
};

}  // namespace

std::size_t lcs_split_column(std::span<const std::uint8_t> old_bytes, std::span<const std::uint8_t> new_bytes,
                             std::size_t x0, std::size_t x1, std::size_t y0, std::size_t y1) {
  const std::size_t mid = (x0 + x1) / 2;
  const std::size_t m = y1 - y0;

  std::vector<std::size_t> forward, backward;
  {
    LcsRow row(m);
    row.set_columns([&](std::size_t k) { return new_bytes[y0 + k]; });
    for (std::size_t x = x0; x < mid; ++x) row.advance(old_bytes[x]);
    row.scores(forward);
  }
  {
    LcsRow row(m);
    row.set_columns([&](std::size_t k) { return new_bytes[y1 - 1 - k]; });
    for (std::size_t x = x1; x > mid; --x) row.advance(old_bytes[x - 1]);
    row.scores(backward);
  }

  // backward[k] scores the last k columns; column j leaves m - j of them.
  std::size_t best_j = 0, best = 0;
  for (std::size_t j = 0; j <= m; ++j) {
    const std::size_t total = forward[j] + backward[m - j];
    if (total > best || j == 0) best = total, best_j = j;
  }
  return y0 + best_j;
}

std::size_t lcs_length(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  LcsRow row(b.size());
  row.set_columns([&](std::size_t k) { return b[k]; });
  for (std::uint8_t symbol : a) row.advance(symbol);
  return row.length();
}

}  // namespace bpatch::detail
