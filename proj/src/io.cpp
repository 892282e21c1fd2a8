#include "bpatch/io.hpp"

#include <fstream>
#include <random>
#include <string>

#include "bpatch/error.hpp"

namespace bpatch {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::encoding_range:
      return "encoding-range";
    case Errc::truncated_stream:
      return "truncated";
    case Errc::size_limit:
      return "size-limit";
    case Errc::malformed_script:
      return "malformed-script";
    case Errc::patch_too_large:
      return "patch-too-large";
    case Errc::malformed_patch:
      return "malformed-patch";
    case Errc::io:
      return "io";
    case Errc::verification_failed:
      return "verification-failed";
    case Errc::invalid_input:
      return "invalid-input";
    case Errc::config:
      return "config";
  }
  return "unknown";
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = in.tellg();
  if (size < 0) throw Error(Errc::io, "cannot size " + path.string());
  in.seekg(0, std::ios::beg);
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
  in.read(reinterpret_cast<char*>(bytes.data()), size);
  if (in.gcount() != size) throw Error(Errc::io, "short read from " + path.string());
  return bytes;
}

void write_file_atomic(const std::filesystem::path& path, const std::function<void(ByteSink&)>& produce) {
  std::random_device rd;
  std::filesystem::path tmp = path;
  tmp += ".tmp-" + std::to_string(rd());
  try {
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error(Errc::io, "cannot create " + tmp.string());
      StreamSink sink(out);
      produce(sink);
      out.flush();
      if (!out) throw Error(Errc::io, "write to " + tmp.string() + " failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(Errc::io, "cannot rename into " + path.string() + ": " + ec.message());
  } catch (...) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw;
  }
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  write_file_atomic(path, [&](ByteSink& sink) { sink.write(bytes); });
}

}  // namespace bpatch
