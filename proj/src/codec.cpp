#include "bpatch/codec.hpp"

#include <string>

#include "bpatch/error.hpp"

namespace bpatch {

namespace {

struct FieldWidths {
  unsigned wnbd, wnbc, wnba;
};

FieldWidths widths_of(const EditTriple& t) {
  return {bit_width(t.discard), bit_width(t.copy), bit_width(t.literals.size())};
}

[[noreturn]] void malformed(const std::string& what) { throw Error(Errc::malformed_patch, what); }

}  // namespace

PatchHeader compute_header(const EditScript& script) {
  unsigned max_wnbd = 0, max_wnbc = 0, max_wnba = 0;
  for (const auto& t : script.triples) {
    if (t.literals.size() > UINT32_MAX) throw Error(Errc::encoding_range, "literal run exceeds 32 bits");
    const auto w = widths_of(t);
    max_wnbd = std::max(max_wnbd, w.wnbd);
    max_wnbc = std::max(max_wnbc, w.wnbc);
    max_wnba = std::max(max_wnba, w.wnba);
  }
  PatchHeader header;
  header.wnbd_meta = static_cast<std::uint8_t>(bit_width(max_wnbd));
  header.wnbc_meta = static_cast<std::uint8_t>(bit_width(max_wnbc));
  header.wnba_meta = static_cast<std::uint8_t>(bit_width(max_wnba));

  std::uint64_t body_bits = 0;
  for (const auto& t : script.triples) {
    const auto w = widths_of(t);
    body_bits += header.wnbd_meta + w.wnbd + header.wnbc_meta + w.wnbc + header.wnba_meta + w.wnba +
                 8 * std::uint64_t{t.literals.size()};
  }
  if (body_bits >= kBodyBitsLimit) {
    throw Error(Errc::patch_too_large, "patch body needs " + std::to_string(body_bits) +
                                           " bits, the format allows fewer than 2^24; send the full image instead");
  }
  header.body_bits = static_cast<std::uint32_t>(body_bits);
  return header;
}

std::vector<std::uint8_t> encode_patch(const EditScript& script) {
  if (!is_canonical(script)) throw Error(Errc::malformed_script, "only canonical scripts can be encoded");
  const PatchHeader header = compute_header(script);

  BitWriter out;
  out.write(header.body_bits, 24);
  out.write(header.wnbd_meta, 8);
  out.write(header.wnbc_meta, 8);
  out.write(header.wnba_meta, 8);
  for (const auto& t : script.triples) {
    const auto w = widths_of(t);
    out.write(w.wnbd, header.wnbd_meta);
    out.write(t.discard, w.wnbd);
    out.write(w.wnbc, header.wnbc_meta);
    out.write(t.copy, w.wnbc);
    out.write(w.wnba, header.wnba_meta);
    out.write(static_cast<std::uint32_t>(t.literals.size()), w.wnba);
    out.write_bytes(t.literals);
  }
  return std::move(out).finalize();
}

PatchDecoder::PatchDecoder(std::span<const std::uint8_t> patch) : reader_(patch) {
  if (patch.size() < kHeaderBytes) {
    throw Error(Errc::truncated_stream,
                "patch is " + std::to_string(patch.size()) + " bytes, the header alone needs 6");
  }
  header_.body_bits = reader_.read(24);
  header_.wnbd_meta = static_cast<std::uint8_t>(reader_.read(8));
  header_.wnbc_meta = static_cast<std::uint8_t>(reader_.read(8));
  header_.wnba_meta = static_cast<std::uint8_t>(reader_.read(8));
  body_start_ = reader_.bit_position();

  for (unsigned meta : {header_.wnbd_meta, header_.wnbc_meta, header_.wnba_meta}) {
    if (meta > kMaxMetaWidth) malformed("meta width " + std::to_string(meta) + " exceeds " + std::to_string(kMaxMetaWidth));
  }

  const std::uint64_t expected = kHeaderBytes + (std::uint64_t{header_.body_bits} + 7) / 8;
  if (patch.size() < expected) {
    throw Error(Errc::truncated_stream, "patch is " + std::to_string(patch.size()) + " bytes, header announces " +
                                            std::to_string(expected));
  }
  if (patch.size() > expected) {
    malformed(std::to_string(patch.size() - expected) + " trailing bytes after the patch body");
  }
  const unsigned pad = static_cast<unsigned>(8 * (expected - kHeaderBytes) - header_.body_bits);
  if (pad != 0 && (patch.back() & ((1u << pad) - 1)) != 0) malformed("nonzero padding bits");
  if (header_.body_bits == 0) finish();
}

std::uint32_t PatchDecoder::read_field(unsigned meta, unsigned& width_seen, const char* name) {
  const std::uint64_t consumed = reader_.bit_position() - body_start_;
  if (consumed + meta > header_.body_bits) malformed(std::string(name) + " width runs past the body");
  const unsigned width = reader_.read(meta);
  if (width > kMaxFieldWidth) malformed(std::string(name) + " width " + std::to_string(width) + " exceeds 32");
  if (consumed + meta + width > header_.body_bits) malformed(std::string(name) + " runs past the body");
  const std::uint32_t value = reader_.read(width);
  if (bit_width(value) != width) malformed(std::string(name) + " is not stored at its minimal width");
  width_seen = std::max(width_seen, width);
  return value;
}

std::optional<PatchDecoder::Opcode> PatchDecoder::next() {
  if (literals_pending_ != 0) skip_literals();
  if (finished_) return std::nullopt;

  Opcode op;
  op.discard = read_field(header_.wnbd_meta, max_wnbd_, "nbd");
  op.copy = read_field(header_.wnbc_meta, max_wnbc_, "nbc");
  op.literals = read_field(header_.wnba_meta, max_wnba_, "nba");

  const std::uint64_t consumed = reader_.bit_position() - body_start_;
  if (consumed + 8 * std::uint64_t{op.literals} > header_.body_bits) malformed("literal run overshoots the body");

  if (op.copy == 0 && op.literals == 0) malformed("opcode pair " + std::to_string(count_) + " is a pure skip");
  if (count_ > 0) {
    if (op.copy == 0) malformed("opcode pair " + std::to_string(count_) + " copies nothing");
    if (first_was_pure_add_ && count_ == 1 && op.discard != 0) malformed("discard split across the leading insert");
    if (!prev_had_literals_ && op.discard == 0) malformed("adjacent copies were not merged");
  } else {
    first_was_pure_add_ = op.copy == 0;
  }
  prev_had_literals_ = op.literals != 0;
  ++count_;
  literals_pending_ = op.literals;
  if (consumed + 8 * std::uint64_t{op.literals} == header_.body_bits) finish();
  return op;
}

void PatchDecoder::read_literals(std::span<std::uint8_t> out) {
  if (out.size() > literals_pending_) throw Error(Errc::invalid_input, "read past the current literal run");
  reader_.read_bytes(out);
  literals_pending_ -= static_cast<std::uint32_t>(out.size());
}

void PatchDecoder::skip_literals() {
  std::uint8_t scratch[256];
  while (literals_pending_ != 0) {
    const std::size_t n = std::min<std::size_t>(literals_pending_, sizeof scratch);
    read_literals({scratch, n});
  }
}

void PatchDecoder::finish() {
  finished_ = true;
  if (header_.wnbd_meta != bit_width(max_wnbd_) || header_.wnbc_meta != bit_width(max_wnbc_) ||
      header_.wnba_meta != bit_width(max_wnba_)) {
    malformed("header meta widths disagree with the opcodes");
  }
}

DecodedPatch decode_patch(std::span<const std::uint8_t> patch) {
  PatchDecoder decoder(patch);
  DecodedPatch decoded{decoder.header(), {}};
  while (auto op = decoder.next()) {
    EditTriple t{op->discard, op->copy, std::vector<std::uint8_t>(op->literals)};
    decoder.read_literals(t.literals);
    decoded.triples.push_back(std::move(t));
  }
  return decoded;
}

PatchInfo patch_info(std::span<const std::uint8_t> patch) {
  PatchDecoder decoder(patch);
  PatchInfo info;
  info.header = decoder.header();
  info.patch_bytes = patch.size();
  while (auto op = decoder.next()) {
    ++info.triples;
    info.discarded += op->discard;
    info.copied += op->copy;
    info.added += op->literals;
  }
  return info;
}

}  // namespace bpatch
