#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace bpatch {

// Forward-only view of the old image.
class ByteSource {
 public:
  virtual ~ByteSource() = default;
  // Fills as much of out as the source allows; short only at end of data.
  virtual std::size_t read(std::span<std::uint8_t> out) = 0;
  // Advances by up to n bytes; returns how many were skipped.
  virtual std::uint64_t skip(std::uint64_t n) = 0;
};

class ByteSink {
 public:
  virtual ~ByteSink() = default;
  virtual void write(std::span<const std::uint8_t> bytes) = 0;
};

class SpanSource final : public ByteSource {
 public:
  explicit SpanSource(std::span<const std::uint8_t> bytes) noexcept : bytes_(bytes) {}
  std::size_t read(std::span<std::uint8_t> out) override;
  std::uint64_t skip(std::uint64_t n) override;

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t position_ = 0;
};

class StreamSource final : public ByteSource {
 public:
  explicit StreamSource(std::istream& in) noexcept : in_(in) {}
  std::size_t read(std::span<std::uint8_t> out) override;
  std::uint64_t skip(std::uint64_t n) override;

 private:
  std::istream& in_;
};

class VectorSink final : public ByteSink {
 public:
  void write(std::span<const std::uint8_t> bytes) override { bytes_.insert(bytes_.end(), bytes.begin(), bytes.end()); }
  std::vector<std::uint8_t>& bytes() noexcept { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

// Throws Errc::io when the stream reports a failed write.
class StreamSink final : public ByteSink {
 public:
  explicit StreamSink(std::ostream& out) noexcept : out_(out) {}
  void write(std::span<const std::uint8_t> bytes) override;

 private:
  std::ostream& out_;
};

struct ApplyOptions {
  std::size_t copy_buffer_bytes = 4096;
};

// Rebuilds the new image from the old one. The patch is validated in full
// before the first byte reaches the sink; the old image is read strictly
// forward through one copy buffer. If the old image runs out mid-copy the
// sink holds partial output and the call throws Errc::malformed_patch.
std::uint64_t apply_patch(ByteSource& old_image, std::span<const std::uint8_t> patch, ByteSink& out,
                          const ApplyOptions& options = {});

std::vector<std::uint8_t> apply_patch(std::span<const std::uint8_t> old_image, std::span<const std::uint8_t> patch);

struct VerifyResult {
  bool ok = false;
  std::string diagnostic;

  explicit operator bool() const noexcept { return ok; }
};

VerifyResult verify(std::span<const std::uint8_t> old_image, std::span<const std::uint8_t> expected_new,
                    std::span<const std::uint8_t> patch);

}  // namespace bpatch
