#pragma once

#include <stdexcept>
#include <string>

namespace bpatch {

enum class Errc {
  encoding_range,
  truncated_stream,
  size_limit,
  malformed_script,
  patch_too_large,
  malformed_patch,
  io,
  verification_failed,
  invalid_input,
  config,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace bpatch
