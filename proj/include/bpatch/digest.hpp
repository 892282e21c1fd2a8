#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>

#include "bpatch/reconstruct.hpp"

namespace bpatch {

// Host-side SHA-256 for output checks; not part of the patch format.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(Sha256&&) noexcept;
  Sha256& operator=(Sha256&&) noexcept;

  void update(std::span<const std::uint8_t> bytes);
  // Lower-case hex; the object must not be updated afterwards.
  std::string hex_digest();

 private:
  struct State;
  std::unique_ptr<State> state_;
};

std::string sha256_hex(std::span<const std::uint8_t> bytes);

// Forwards to an inner sink while hashing everything written.
class HashingSink final : public ByteSink {
 public:
  explicit HashingSink(ByteSink& inner) : inner_(inner) {}
  void write(std::span<const std::uint8_t> bytes) override {
    hash_.update(bytes);
    inner_.write(bytes);
  }
  std::string hex_digest() { return hash_.hex_digest(); }

 private:
  ByteSink& inner_;
  Sha256 hash_;
};

}  // namespace bpatch
