#include "bpatch/reconstruct.hpp"

#include <algorithm>
#include <cstring>

#include "bpatch/codec.hpp"
#include "bpatch/error.hpp"

namespace bpatch {

std::size_t SpanSource::read(std::span<std::uint8_t> out) {
  const std::size_t n = std::min(out.size(), bytes_.size() - position_);
  std::memcpy(out.data(), bytes_.data() + position_, n);
  position_ += n;
  return n;
}

std::uint64_t SpanSource::skip(std::uint64_t n) {
  const std::uint64_t step = std::min<std::uint64_t>(n, bytes_.size() - position_);
  position_ += static_cast<std::size_t>(step);
  return step;
}

std::size_t StreamSource::read(std::span<std::uint8_t> out) {
  in_.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(out.size()));
  return static_cast<std::size_t>(in_.gcount());
}

std::uint64_t StreamSource::skip(std::uint64_t n) {
  std::uint64_t skipped = 0;
  while (skipped < n && in_) {
    const auto chunk = static_cast<std::streamsize>(std::min<std::uint64_t>(n - skipped, 1 << 20));
    in_.ignore(chunk);
    const auto got = in_.gcount();
    skipped += static_cast<std::uint64_t>(got);
    if (got < chunk) break;
  }
  return skipped;
}

void StreamSink::write(std::span<const std::uint8_t> bytes) {
  out_.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out_) throw Error(Errc::io, "write to output failed");
}

std::uint64_t apply_patch(ByteSource& old_image, std::span<const std::uint8_t> patch, ByteSink& out,
                          const ApplyOptions& options) {
  if (options.copy_buffer_bytes == 0) throw Error(Errc::invalid_input, "copy buffer must be non-empty");

  {
    PatchDecoder check(patch);
    while (check.next()) {
    }
  }

  std::vector<std::uint8_t> buffer(options.copy_buffer_bytes);
  PatchDecoder decoder(patch);
  std::uint64_t written = 0;
  while (auto op = decoder.next()) {
    if (old_image.skip(op->discard) != op->discard) {
      throw Error(Errc::malformed_patch, "old image ends inside a discard");
    }
    for (std::uint32_t left = op->copy; left != 0;) {
      const std::size_t want = std::min<std::size_t>(left, buffer.size());
      if (old_image.read({buffer.data(), want}) != want) {
        throw Error(Errc::malformed_patch, "old image ends inside a copy");
      }
      out.write({buffer.data(), want});
      left -= static_cast<std::uint32_t>(want);
    }
    for (std::uint32_t left = op->literals; left != 0;) {
      const std::size_t want = std::min<std::size_t>(left, buffer.size());
      decoder.read_literals({buffer.data(), want});
      out.write({buffer.data(), want});
      left -= static_cast<std::uint32_t>(want);
    }
    written += std::uint64_t{op->copy} + op->literals;
  }
  return written;
}

std::vector<std::uint8_t> apply_patch(std::span<const std::uint8_t> old_image, std::span<const std::uint8_t> patch) {
  SpanSource source(old_image);
  VectorSink sink;
  apply_patch(source, patch, sink);
  return std::move(sink.bytes());
}

namespace {

class CompareSink final : public ByteSink {
 public:
  explicit CompareSink(std::span<const std::uint8_t> expected) noexcept : expected_(expected) {}

  void write(std::span<const std::uint8_t> bytes) override {
    if (mismatch_) return;
    if (bytes.size() > expected_.size() - position_ ||
        std::memcmp(bytes.data(), expected_.data() + position_, bytes.size()) != 0) {
      mismatch_ = true;
      return;
    }
    position_ += bytes.size();
  }

  bool matches() const noexcept { return !mismatch_ && position_ == expected_.size(); }
  bool mismatched() const noexcept { return mismatch_; }
  std::size_t position() const noexcept { return position_; }

 private:
  std::span<const std::uint8_t> expected_;
  std::size_t position_ = 0;
  bool mismatch_ = false;
};

}  // namespace

VerifyResult verify(std::span<const std::uint8_t> old_image, std::span<const std::uint8_t> expected_new,
                    std::span<const std::uint8_t> patch) {
  SpanSource source(old_image);
  CompareSink sink(expected_new);
  try {
    apply_patch(source, patch, sink);
  } catch (const Error& e) {
    return {false, std::string(errc_name(e.code())) + ": " + e.what()};
  }
  if (sink.mismatched()) return {false, "output diverges from the expected image near byte " + std::to_string(sink.position())};
  if (!sink.matches()) {
    return {false, "output is " + std::to_string(sink.position()) + " bytes, expected " +
                       std::to_string(expected_new.size())};
  }
  return {true, {}};
}

}  // namespace bpatch
