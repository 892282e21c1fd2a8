#include <doctest.h>

#include <random>
#include <vector>

#include "bpatch/bitstream.hpp"
#include "bpatch/codec.hpp"
#include "bpatch/error.hpp"
#include "oracles.hpp"

using namespace bpatch;
using Bytes = std::vector<std::uint8_t>;

namespace {

const EditScript kExample{{{0, 1, {0xDD}}, {1, 1, {}}}, 3, 3};
const Bytes kExamplePatch{0x00, 0x00, 0x12, 0x01, 0x01, 0x01, 0x7E, 0xEF, 0x80};

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::io;
}

EditScript random_canonical(std::mt19937_64& rng) {
  std::vector<EditTriple> raw;
  std::size_t old_len = 0, new_len = 0;
  const int n = static_cast<int>(rng() % 12);
  for (int k = 0; k < n; ++k) {
    const unsigned scale = static_cast<unsigned>(rng() % 20);
    EditTriple t{static_cast<std::uint32_t>(rng() % ((1u << scale) + 1)),
                 static_cast<std::uint32_t>(rng() % ((1u << scale) + 1)), {}};
    for (auto len = rng() % 5; len > 0; --len) t.literals.push_back(static_cast<std::uint8_t>(rng()));
    old_len += t.discard + t.copy;
    new_len += t.copy + t.literals.size();
    raw.push_back(std::move(t));
  }
  return canonicalize(std::move(raw), old_len, new_len);
}

}  // namespace

TEST_CASE("compute_header examples") {
  CHECK(compute_header(kExample) == PatchHeader{18, 1, 1, 1});
  CHECK(compute_header(EditScript{}) == PatchHeader{0, 0, 0, 0});
  const auto big = compute_header(EditScript{{{0, 1u << 23, {}}}, 1u << 23, 1u << 23});
  CHECK(big.wnbc_meta == 5);
  CHECK(big.wnbd_meta == 0);
  CHECK(big.wnba_meta == 0);
  CHECK(big.body_bits == 5 + 24);
}

TEST_CASE("encode_patch: hand-traced vectors") {
  CHECK(encode_patch(kExample) == kExamplePatch);
  CHECK(oracle::encode_reference(kExample.triples) == kExamplePatch);
  CHECK(encode_patch(EditScript{}) == Bytes(6, 0));

  const EditScript identity{{{0, 100, {}}}, 100, 100};
  const Bytes patch = encode_patch(identity);
  CHECK(patch.size() == 8);
  CHECK(compute_header(identity) == PatchHeader{10, 0, 3, 0});
  // body: wnbc=7 in 3 bits, then 100 in 7 bits: 111 1100100 + 6 pad bits
  CHECK(patch == Bytes{0x00, 0x00, 0x0A, 0x00, 0x03, 0x00, 0xF9, 0x00});
}

TEST_CASE("decode_patch examples") {
  const auto decoded = decode_patch(kExamplePatch);
  CHECK(decoded.header == PatchHeader{18, 1, 1, 1});
  CHECK(decoded.triples == kExample.triples);

  CHECK(decode_patch(Bytes(6, 0)).triples.empty());
  CHECK(code_of([] { decode_patch(Bytes(5, 0)); }) == Errc::truncated_stream);
}

TEST_CASE("patch_info") {
  const auto info = patch_info(kExamplePatch);
  CHECK(info.triples == 2);
  CHECK(info.copied == 2);
  CHECK(info.added == 1);
  CHECK(info.discarded == 1);
  CHECK(info.patch_bytes == 9);

  const auto empty = patch_info(Bytes(6, 0));
  CHECK(empty == PatchInfo{{}, 0, 0, 0, 0, 6});

  Bytes bad = kExamplePatch;
  bad.back() |= 0x01;
  CHECK(code_of([&] { patch_info(bad); }) == Errc::malformed_patch);
}

TEST_CASE("encoder refuses non-canonical or oversized scripts") {
  CHECK(code_of([] { encode_patch(EditScript{{{0, 2, {}}, {0, 3, {}}}, 5, 5}); }) == Errc::malformed_script);
  EditScript huge{{{0, 0, Bytes(std::size_t{1} << 21, 0x55)}}, 0, std::size_t{1} << 21};
  CHECK(code_of([&] { compute_header(huge); }) == Errc::patch_too_large);
  CHECK(code_of([&] { encode_patch(huge); }) == Errc::patch_too_large);
}

TEST_CASE("decoder rejects structural corruption") {
  SUBCASE("trailing bytes") {
    Bytes p = kExamplePatch;
    p.push_back(0);
    CHECK(code_of([&] { decode_patch(p); }) == Errc::malformed_patch);
  }
  SUBCASE("body shorter than announced") {
    Bytes p = kExamplePatch;
    p.pop_back();
    CHECK(code_of([&] { decode_patch(p); }) == Errc::truncated_stream);
  }
  SUBCASE("oversized meta width") {
    Bytes p = kExamplePatch;
    p[3] = 7;
    CHECK(code_of([&] { decode_patch(p); }) == Errc::malformed_patch);
  }
  SUBCASE("dishonest header widths") {
    // WNBD widened to 2: the body no longer parses the same way.
    Bytes p = kExamplePatch;
    p[3] = 2;
    CHECK_THROWS_AS(decode_patch(p), Error);
  }
  SUBCASE("pure skip opcode") {
    // body: wnbd=1 nbd=1 wnbc=0 wnba=0 -> skip-only pair
    BitWriter w;
    w.write(4, 24);
    w.write(1, 8);
    w.write(1, 8);
    w.write(1, 8);
    w.write(1, 1);
    w.write(1, 1);
    w.write(0, 1);
    w.write(0, 1);
    CHECK(code_of([&] { decode_patch(std::move(w).finalize()); }) == Errc::malformed_patch);
  }
  SUBCASE("non-minimal field width") {
    // nbc=1 stored in 2 bits
    BitWriter w;
    w.write(4, 24);
    w.write(0, 8);
    w.write(2, 8);
    w.write(0, 8);
    w.write(2, 2);
    w.write(1, 2);
    w.write(0, 0);
    CHECK(code_of([&] { decode_patch(std::move(w).finalize()); }) == Errc::malformed_patch);
  }
  SUBCASE("literal run overshooting the body") {
    Bytes p = kExamplePatch;
    p[2] = 0x0D;  // body_bits 13 cuts into the second pair
    p.pop_back();
    CHECK_THROWS_AS(decode_patch(p), Error);
  }
  SUBCASE("all-zero meta widths with a non-empty body") {
    Bytes p{0x00, 0x00, 0x08, 0x00, 0x00, 0x00, 0x00};
    CHECK(code_of([&] { decode_patch(p); }) == Errc::malformed_patch);
  }
}

TEST_CASE("property: round trip, size formula, header honesty, overhead accounting") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 3000; ++trial) {
    const EditScript s = random_canonical(rng);
    REQUIRE(is_canonical(s));
    const PatchHeader h = compute_header(s);
    const Bytes patch = encode_patch(s);

    CHECK(patch == oracle::encode_reference(s.triples));
    CHECK(patch.size() == kHeaderBytes + (h.body_bits + 7) / 8);

    const auto decoded = decode_patch(patch);
    CHECK(decoded.triples == s.triples);
    CHECK(decoded.header == h);

    std::uint64_t overhead = 0, literal_bits = 0;
    for (const auto& t : decoded.triples) {
      overhead += h.wnbd_meta + bit_width(t.discard) + h.wnbc_meta + bit_width(t.copy) + h.wnba_meta +
                  bit_width(t.literals.size());
      literal_bits += 8 * t.literals.size();
    }
    CHECK(overhead + literal_bits == h.body_bits);
  }
}

TEST_CASE("property: growing any count never shrinks the body") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 1000; ++trial) {
    EditScript s = random_canonical(rng);
    if (s.triples.empty()) continue;
    const auto before = compute_header(s).body_bits;
    auto& t = s.triples[rng() % s.triples.size()];
    switch (rng() % 3) {
      case 0:
        t.discard += 1 + static_cast<std::uint32_t>(rng() % 1000);
        break;
      case 1:
        t.copy += 1 + static_cast<std::uint32_t>(rng() % 1000);
        break;
      default:
        t.literals.push_back(0);
        break;
    }
    CHECK(compute_header(s).body_bits >= before);
  }
}

TEST_CASE("streaming decoder yields literals in pieces") {
  const EditScript s{{{0, 0, {1, 2, 3, 4, 5}}, {0, 7, {6}}}, 7, 13};
  const Bytes patch = encode_patch(s);
  PatchDecoder d(patch);
  auto op = d.next();
  REQUIRE(op);
  CHECK(op->literals == 5);
  Bytes first(2), rest(3);
  d.read_literals(first);
  d.read_literals(rest);
  CHECK(first == Bytes{1, 2});
  CHECK(rest == Bytes{3, 4, 5});
  op = d.next();
  REQUIRE(op);
  CHECK(op->copy == 7);
  // Unread literals are skipped on the next call.
  CHECK_FALSE(d.next());
  CHECK(d.opcode_count() == 2);
}
