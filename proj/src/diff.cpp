#include "bpatch/diff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bpatch/error.hpp"

namespace bpatch {

namespace {

using Offset = std::ptrdiff_t;

struct Split {
  Offset xmid = 0;
  Offset ymid = 0;
  bool found = false;  // false: the minimal search gave up, use the LCS splitter
};

// Myers O(ND) search over old[xoff,xlim) x new[yoff,ylim), linear space, with
// a simultaneous forward and backward sweep meeting at a middle snake.
class Differ {
 public:
  Differ(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b, DiffMode mode)
      : a_(a),
        b_(b),
        mode_(mode),
        diag_storage_(2 * (a.size() + b.size() + 3)),
        deleted_(a.size(), 0),
        inserted_(b.size(), 0) {
    const Offset span = static_cast<Offset>(a.size() + b.size() + 3);
    fd_ = diag_storage_.data() + (b.size() + 1);
    bd_ = diag_storage_.data() + span + (b.size() + 1);
  }

  void run() {
    struct Range {
      Offset xoff, xlim, yoff, ylim;
    };
    std::vector<Range> stack;
    stack.push_back({0, static_cast<Offset>(a_.size()), 0, static_cast<Offset>(b_.size())});
    while (!stack.empty()) {
      auto [xoff, xlim, yoff, ylim] = stack.back();
      stack.pop_back();

      while (xoff < xlim && yoff < ylim && a_[xoff] == b_[yoff]) ++xoff, ++yoff;
      while (xoff < xlim && yoff < ylim && a_[xlim - 1] == b_[ylim - 1]) --xlim, --ylim;

      if (xoff == xlim) {
        std::fill(inserted_.begin() + yoff, inserted_.begin() + ylim, 1);
        continue;
      }
      if (yoff == ylim) {
        std::fill(deleted_.begin() + xoff, deleted_.begin() + xlim, 1);
        continue;
      }
      if (xlim - xoff == 1 || ylim - yoff == 1) {
        single_element(xoff, xlim, yoff, ylim);
        continue;
      }

      Split split = middle_snake(xoff, xlim, yoff, ylim);
      if (!split.found) {
        split.xmid = (xoff + xlim) / 2;
        split.ymid = static_cast<Offset>(detail::lcs_split_column(
            a_, b_, static_cast<std::size_t>(xoff), static_cast<std::size_t>(xlim), static_cast<std::size_t>(yoff),
            static_cast<std::size_t>(ylim)));
      }
      stack.push_back({split.xmid, xlim, split.ymid, ylim});
      stack.push_back({xoff, split.xmid, yoff, split.ymid});
    }
  }

  const std::vector<std::uint8_t>& deleted() const { return deleted_; }
  const std::vector<std::uint8_t>& inserted() const { return inserted_; }

 private:
  // One side has a single element: match it against the first equal byte on
  // the other side, if any.
  void single_element(Offset xoff, Offset xlim, Offset yoff, Offset ylim) {
    if (xlim - xoff == 1) {
      const std::uint8_t value = a_[xoff];
      Offset hit = ylim;
      for (Offset y = yoff; y < ylim; ++y) {
        if (b_[y] == value) {
          hit = y;
          break;
        }
      }
      if (hit == ylim) deleted_[xoff] = 1;
      for (Offset y = yoff; y < ylim; ++y) {
        if (y != hit) inserted_[y] = 1;
      }
      return;
    }
    const std::uint8_t value = b_[yoff];
    Offset hit = xlim;
    for (Offset x = xoff; x < xlim; ++x) {
      if (a_[x] == value) {
        hit = x;
        break;
      }
    }
    if (hit == xlim) inserted_[yoff] = 1;
    for (Offset x = xoff; x < xlim; ++x) {
      if (x != hit) deleted_[x] = 1;
    }
  }

  // Edit cost past which the exact search hands over to the bit-parallel
  // splitter: Myers spends about c^2 diagonal steps by cost c, the splitter
  // about n*m/64 word steps.
  static Offset minimal_budget(Offset n, Offset m) {
    if (m > kMaxBitParallelColumns) return std::numeric_limits<Offset>::max();
    const double words = static_cast<double>(n) * static_cast<double>((m + 63) / 64);
    return std::max<Offset>(64, static_cast<Offset>(std::sqrt(8.0 * words)));
  }

  static constexpr Offset kMaxBitParallelColumns = Offset{1} << 18;

  Split middle_snake(Offset xoff, Offset xlim, Offset yoff, Offset ylim) {
    Offset* const fd = fd_;
    Offset* const bd = bd_;
    const Offset dmin = xoff - ylim;
    const Offset dmax = xlim - yoff;
    const Offset fmid = xoff - yoff;
    const Offset bmid = xlim - ylim;
    Offset fmin = fmid, fmax = fmid;
    Offset bmin = bmid, bmax = bmid;
    const bool odd = ((fmid - bmid) & 1) != 0;
    const bool fast = mode_.kind == DiffMode::Kind::fast;
    const Offset limit = fast ? std::max<Offset>(1, mode_.cutoff) : minimal_budget(xlim - xoff, ylim - yoff);

    fd[fmid] = xoff;
    bd[bmid] = xlim;

    for (Offset c = 1;; ++c) {
      if (fmin > dmin) {
        fd[--fmin - 1] = -1;
      } else {
        ++fmin;
      }
      if (fmax < dmax) {
        fd[++fmax + 1] = -1;
      } else {
        --fmax;
      }
      for (Offset d = fmax; d >= fmin; d -= 2) {
        const Offset tlo = fd[d - 1];
        const Offset thi = fd[d + 1];
        Offset x = tlo < thi ? thi : tlo + 1;
        Offset y = x - d;
        while (x < xlim && y < ylim && a_[x] == b_[y]) ++x, ++y;
        fd[d] = x;
        if (odd && bmin <= d && d <= bmax && bd[d] <= x) return {x, y, true};
      }

      if (bmin > dmin) {
        bd[--bmin - 1] = std::numeric_limits<Offset>::max();
      } else {
        ++bmin;
      }
      if (bmax < dmax) {
        bd[++bmax + 1] = std::numeric_limits<Offset>::max();
      } else {
        --bmax;
      }
      for (Offset d = bmax; d >= bmin; d -= 2) {
        const Offset tlo = bd[d - 1];
        const Offset thi = bd[d + 1];
        Offset x = tlo < thi ? tlo : thi - 1;
        Offset y = x - d;
        while (xoff < x && yoff < y && a_[x - 1] == b_[y - 1]) --x, --y;
        bd[d] = x;
        if (!odd && fmin <= d && d <= fmax && x <= fd[d]) return {x, y, true};
      }

      if (c >= limit) {
        if (!fast) return {};
        return furthest_reaching(xoff, xlim, yoff, ylim, fmin, fmax, bmin, bmax);
      }
    }
  }

  // Gives up on optimality: split at whichever sweep has advanced furthest.
  Split furthest_reaching(Offset xoff, Offset xlim, Offset yoff, Offset ylim, Offset fmin, Offset fmax, Offset bmin,
                          Offset bmax) const {
    Offset fxybest = -1, fxbest = 0;
    for (Offset d = fmax; d >= fmin; d -= 2) {
      Offset x = std::min(fd_[d], xlim);
      Offset y = x - d;
      if (ylim < y) x = ylim + d, y = ylim;
      if (fxybest < x + y) fxybest = x + y, fxbest = x;
    }
    Offset bxybest = std::numeric_limits<Offset>::max(), bxbest = 0;
    for (Offset d = bmax; d >= bmin; d -= 2) {
      Offset x = std::max(xoff, bd_[d]);
      Offset y = x - d;
      if (y < yoff) x = yoff + d, y = yoff;
      if (x + y < bxybest) bxybest = x + y, bxbest = x;
    }
    if ((xlim + ylim) - bxybest < fxybest - (xoff + yoff)) return {fxbest, fxybest - fxbest, true};
    return {bxbest, bxybest - bxbest, true};
  }

  std::span<const std::uint8_t> a_;
  std::span<const std::uint8_t> b_;
  DiffMode mode_;
  std::vector<Offset> diag_storage_;
  Offset* fd_ = nullptr;
  Offset* bd_ = nullptr;
  std::vector<std::uint8_t> deleted_;
  std::vector<std::uint8_t> inserted_;
};

void check_script_sizes(std::size_t old_len, std::size_t new_len) {
  constexpr std::size_t limit = std::numeric_limits<std::uint32_t>::max();
  if (old_len > limit || new_len > limit) {
    throw Error(Errc::malformed_script, "script lengths must fit in 32 bits");
  }
}

}  // namespace

EditScript compute_edit_script(std::span<const std::uint8_t> old_bytes, std::span<const std::uint8_t> new_bytes,
                               DiffMode mode) {
  if (old_bytes.size() >= kMaxImageBytes || new_bytes.size() >= kMaxImageBytes) {
    throw Error(Errc::size_limit, "input exceeds the " + std::to_string(kMaxImageBytes) + "-byte ceiling");
  }

  Differ differ(old_bytes, new_bytes, mode);
  differ.run();
  const auto& deleted = differ.deleted();
  const auto& inserted = differ.inserted();

  // Raw alternation of gaps and common runs; canonicalize() merges them.
  std::vector<EditTriple> raw;
  std::size_t i = 0, j = 0;
  const std::size_t n = old_bytes.size(), m = new_bytes.size();
  while (i < n || j < m) {
    const std::size_t i_start = i, j_start = j;
    EditTriple gap;
    while (i < n && deleted[i]) ++gap.discard, ++i;
    while (j < m && inserted[j]) gap.literals.push_back(new_bytes[j++]);
    if (gap.discard != 0 || !gap.literals.empty()) raw.push_back(std::move(gap));

    std::uint32_t run = 0;
    while (i < n && j < m && !deleted[i] && !inserted[j]) ++run, ++i, ++j;
    if (run != 0) {
      raw.push_back({0, run, {}});
    } else if (i == i_start && j == j_start) {
      throw Error(Errc::malformed_script, "diff produced an inconsistent alignment");
    }
  }
  return canonicalize(std::move(raw), n, m);
}

EditScript canonicalize(std::vector<EditTriple> triples, std::size_t old_len, std::size_t new_len) {
  check_script_sizes(old_len, new_len);

  std::uint64_t old_cursor = 0, produced = 0;
  for (const auto& t : triples) {
    old_cursor += std::uint64_t{t.discard} + t.copy;
    produced += std::uint64_t{t.copy} + t.literals.size();
    if (old_cursor > old_len) {
      throw Error(Errc::malformed_script, "triples read " + std::to_string(old_cursor) + " bytes of a " +
                                              std::to_string(old_len) + "-byte old image");
    }
  }
  if (produced != new_len) {
    throw Error(Errc::malformed_script,
                "triples produce " + std::to_string(produced) + " bytes, expected " + std::to_string(new_len));
  }

  EditScript script{{}, old_len, new_len};
  auto& out = script.triples;
  std::uint32_t pending_discard = 0;
  for (auto& t : triples) {
    pending_discard += t.discard;
    if (t.copy == 0) {
      if (t.literals.empty()) continue;
      if (out.empty()) {
        out.push_back({pending_discard, 0, std::move(t.literals)});
        pending_discard = 0;
        continue;
      }
      auto& lits = out.back().literals;
      lits.insert(lits.end(), t.literals.begin(), t.literals.end());
      if (out.back().copy == 0) {
        out.back().discard += pending_discard;
        pending_discard = 0;
      }
      continue;
    }
    if (!out.empty() && out.back().copy == 0) {
      out.back().discard += pending_discard;
      pending_discard = 0;
    }
    if (!out.empty() && pending_discard == 0 && out.back().literals.empty()) {
      out.back().copy += t.copy;
      out.back().literals = std::move(t.literals);
    } else {
      out.push_back({pending_discard, t.copy, std::move(t.literals)});
    }
    pending_discard = 0;
  }
  return script;
}

bool is_canonical(const EditScript& script) noexcept {
  std::uint64_t old_cursor = 0, produced = 0;
  const auto& ts = script.triples;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const auto& t = ts[k];
    if (t.copy == 0 && t.literals.empty()) return false;
    if (t.copy == 0 && k != 0) return false;
    if (k > 0) {
      const auto& prev = ts[k - 1];
      if (prev.copy == 0 && t.discard != 0) return false;
      if (prev.literals.empty() && t.discard == 0) return false;
    }
    old_cursor += std::uint64_t{t.discard} + t.copy;
    produced += std::uint64_t{t.copy} + t.literals.size();
  }
  return old_cursor <= script.old_len && produced == script.new_len;
}

std::vector<std::uint8_t> apply_script(std::span<const std::uint8_t> old_bytes, const EditScript& script) {
  std::vector<std::uint8_t> out;
  out.reserve(script.new_len);
  std::uint64_t cursor = 0;
  for (const auto& t : script.triples) {
    cursor += t.discard;
    if (cursor + t.copy > old_bytes.size()) {
      throw Error(Errc::malformed_script, "script reads past the end of the old image");
    }
    out.insert(out.end(), old_bytes.begin() + static_cast<std::ptrdiff_t>(cursor),
               old_bytes.begin() + static_cast<std::ptrdiff_t>(cursor + t.copy));
    cursor += t.copy;
    out.insert(out.end(), t.literals.begin(), t.literals.end());
  }
  return out;
}

ScriptCost script_cost(const EditScript& script) noexcept {
  ScriptCost cost;
  std::size_t copied = 0;
  for (const auto& t : script.triples) {
    copied += t.copy;
    cost.inserted += t.literals.size();
  }
  cost.deleted = script.old_len - copied;
  return cost;
}

}  // namespace bpatch
