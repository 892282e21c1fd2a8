#include <doctest.h>

#include <random>
#include <sstream>
#include <vector>

#include "alloc_counter.hpp"
#include "bpatch/codec.hpp"
#include "bpatch/diff.hpp"
#include "bpatch/error.hpp"
#include "bpatch/reconstruct.hpp"
#include "oracles.hpp"

using namespace bpatch;
using Bytes = std::vector<std::uint8_t>;

namespace {

const Bytes kOld{0xAA, 0xBB, 0xCC};
const Bytes kNew{0xAA, 0xDD, 0xCC};
const Bytes kPatch{0x00, 0x00, 0x12, 0x01, 0x01, 0x01, 0x7E, 0xEF, 0x80};

// Records every access to the old image and flags any request that would
// move backwards.
class TracingSource final : public ByteSource {
 public:
  explicit TracingSource(std::span<const std::uint8_t> bytes) : inner_(bytes) {}

  std::size_t read(std::span<std::uint8_t> out) override {
    const std::size_t n = inner_.read(out);
    position_ += n;
    max_request_ = std::max(max_request_, out.size());
    return n;
  }
  std::uint64_t skip(std::uint64_t n) override {
    const auto step = inner_.skip(n);
    position_ += step;
    return step;
  }

  std::uint64_t position() const { return position_; }
  std::size_t max_request() const { return max_request_; }

 private:
  SpanSource inner_;
  std::uint64_t position_ = 0;
  std::size_t max_request_ = 0;
};

class NullSink final : public ByteSink {
 public:
  void write(std::span<const std::uint8_t> bytes) override { written += bytes.size(); }
  std::uint64_t written = 0;
};

class FailingSink final : public ByteSink {
 public:
  void write(std::span<const std::uint8_t>) override { throw Error(Errc::io, "disk full"); }
};

Bytes random_image(std::mt19937_64& rng, std::size_t n) {
  Bytes b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(rng());
  return b;
}

Bytes mutated(std::mt19937_64& rng, const Bytes& base, double rate) {
  Bytes out;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    if (u < rate / 3) continue;
    if (u < 2 * rate / 3) out.push_back(static_cast<std::uint8_t>(rng()));
    out.push_back(u < rate ? static_cast<std::uint8_t>(base[i] ^ 0x5A) : base[i]);
  }
  return out;
}

}  // namespace

TEST_CASE("apply_patch examples") {
  CHECK(apply_patch(kOld, kPatch) == kNew);
  CHECK(apply_patch(kOld, Bytes(6, 0)).empty());

  Bytes image(100);
  for (std::size_t i = 0; i < image.size(); ++i) image[i] = static_cast<std::uint8_t>(i * 7);
  const Bytes identity = encode_patch(EditScript{{{0, 100, {}}}, 100, 100});
  CHECK(apply_patch(image, identity) == image);
}

TEST_CASE("apply_patch from a stream into a stream") {
  std::istringstream in(std::string(kOld.begin(), kOld.end()));
  std::ostringstream out;
  StreamSource source(in);
  StreamSink sink(out);
  CHECK(apply_patch(source, kPatch, sink) == 3);
  CHECK(out.str() == std::string(kNew.begin(), kNew.end()));
}

TEST_CASE("short old image is a malformed-patch error") {
  const Bytes short_old{0xAA};
  try {
    apply_patch(short_old, kPatch);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::malformed_patch);
  }
}

TEST_CASE("sink failures propagate") {
  SpanSource source(kOld);
  FailingSink sink;
  try {
    apply_patch(source, kPatch, sink);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::io);
  }
}

TEST_CASE("a corrupt patch writes nothing") {
  Bytes bad = kPatch;
  bad.back() = 0x81;
  SpanSource source(kOld);
  NullSink sink;
  CHECK_THROWS_AS(apply_patch(source, bad, sink), Error);
  CHECK(sink.written == 0);
}

TEST_CASE("verify") {
  CHECK(verify(kOld, kNew, kPatch).ok);
  CHECK(verify(kNew, kNew, kPatch).ok);  // the changed byte is discarded
  CHECK_FALSE(verify(Bytes{0x00, 0xBB, 0xCC}, kNew, kPatch).ok);
  CHECK_FALSE(verify(kOld, kOld, kPatch).ok);
  const auto truncated = verify(kOld, kNew, Bytes(kPatch.begin(), kPatch.end() - 1));
  CHECK_FALSE(truncated.ok);
  CHECK_FALSE(truncated.diagnostic.empty());
  CHECK_FALSE(verify(kOld, Bytes{0xAA, 0xDD}, kPatch).ok);
  CHECK_FALSE(verify(kOld, Bytes{0xAA, 0xDD, 0xCC, 0x00}, kPatch).ok);
}

TEST_CASE("property: streaming apply equals the in-memory oracle and reads forward only") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const Bytes old_b = random_image(rng, rng() % 6000);
    const Bytes new_b = mutated(rng, old_b, 0.0001 + 0.3 * static_cast<double>(rng() % 100) / 100.0);
    const auto script = compute_edit_script(old_b, new_b, trial % 2 ? DiffMode::fast(32) : DiffMode::minimal());
    const Bytes patch = encode_patch(script);

    TracingSource source(old_b);
    VectorSink sink;
    ApplyOptions options;
    options.copy_buffer_bytes = 1 + rng() % 300;
    const auto written = apply_patch(source, patch, sink, options);
    CHECK(written == new_b.size());
    CHECK(sink.bytes() == new_b);
    CHECK(sink.bytes() == apply_script(old_b, script));
    CHECK(sink.bytes() == oracle::apply_reference(old_b, decode_patch(patch).triples));
    CHECK(source.max_request() <= options.copy_buffer_bytes);
    CHECK(source.position() <= old_b.size());
  }
}

TEST_CASE("auxiliary memory is bounded by the copy buffer") {
  std::mt19937_64 rng(103);
  const Bytes old_b = random_image(rng, 1 << 20);
  Bytes new_b = old_b;
  for (int k = 0; k < 64; ++k) new_b[rng() % new_b.size()] ^= 0x40;
  const Bytes patch = encode_patch(compute_edit_script(old_b, new_b, DiffMode::minimal()));

  for (std::size_t buffer : {std::size_t{256}, std::size_t{4096}, std::size_t{65536}}) {
    SpanSource source(old_b);
    NullSink sink;
    ApplyOptions options;
    options.copy_buffer_bytes = buffer;
    alloc_counter::reset_peak();
    const std::size_t base = alloc_counter::live_bytes();
    apply_patch(source, patch, sink, options);
    const std::size_t extra = alloc_counter::peak_bytes() - base;
    CHECK(extra <= buffer + 1024);
    CHECK(sink.written == new_b.size());
  }
}
