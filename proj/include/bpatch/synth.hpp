#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "bpatch/bench.hpp"

namespace bpatch::synth {

// Seeded generator whose output is identical on every standard library:
// only the raw mt19937_64 sequence is used, never <random> distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Uniform in [lo, hi].
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + engine_() % (hi - lo + 1); }
  std::uint8_t byte() { return static_cast<std::uint8_t>(engine_() >> 56); }

 private:
  std::mt19937_64 engine_;
};

// `rate` is the expected fraction of base bytes touched. Each touch is a
// byte flip, a block insert or a block delete, drawn by the given weights;
// blocks are 1..max_block bytes.
struct MutationSpec {
  double rate = 0.01;
  double flip_weight = 1.0;
  double insert_weight = 1.0;
  double delete_weight = 1.0;
  std::size_t max_block = 16;
};

std::vector<std::uint8_t> random_image(std::size_t size, Rng& rng);

std::vector<std::uint8_t> mutate(std::span<const std::uint8_t> base, const MutationSpec& spec, Rng& rng);

// Changes exactly `count` distinct bytes in place (each to a different value).
void scatter_byte_changes(std::vector<std::uint8_t>& image, std::size_t count, Rng& rng);

struct CorpusSpec {
  std::string name = "synthetic";
  std::size_t image_bytes = 64 * 1024;
  std::uint64_t seed = 1;
  // One entry per derived version; version k+1 mutates version k.
  std::vector<MutationSpec> steps;
};

// Writes v0.bin .. vN.bin and manifest.tsv into dir; returns the manifest.
CorpusManifest write_corpus(const std::filesystem::path& dir, const CorpusSpec& spec);

}  // namespace bpatch::synth
