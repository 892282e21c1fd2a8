#include "bpatch/synth.hpp"

#include <fstream>

#include "bpatch/error.hpp"
#include "bpatch/io.hpp"

namespace bpatch::synth {

std::vector<std::uint8_t> random_image(std::size_t size, Rng& rng) {
  std::vector<std::uint8_t> image(size);
  for (auto& b : image) b = rng.byte();
  return image;
}

std::vector<std::uint8_t> mutate(std::span<const std::uint8_t> base, const MutationSpec& spec, Rng& rng) {
  const double total_weight = spec.flip_weight + spec.insert_weight + spec.delete_weight;
  if (!(total_weight > 0) || spec.max_block == 0 || !(spec.rate >= 0)) {
    throw Error(Errc::invalid_input, "mutation spec needs a positive weight and block size");
  }
  const double block_mean = (1.0 + static_cast<double>(spec.max_block)) / 2.0;
  const double mean_touch =
      (spec.flip_weight + (spec.insert_weight + spec.delete_weight) * block_mean) / total_weight;
  const double per_byte = spec.rate / mean_touch;

  std::vector<std::uint8_t> out;
  out.reserve(base.size() + base.size() / 8);
  std::size_t p = 0;
  while (p < base.size()) {
    if (rng.unit() >= per_byte) {
      out.push_back(base[p++]);
      continue;
    }
    const double pick = rng.unit() * total_weight;
    if (pick < spec.flip_weight) {
      out.push_back(static_cast<std::uint8_t>(base[p++] ^ rng.between(1, 255)));
    } else if (pick < spec.flip_weight + spec.insert_weight) {
      const auto len = rng.between(1, spec.max_block);
      for (std::uint64_t k = 0; k < len; ++k) out.push_back(rng.byte());
      out.push_back(base[p++]);
    } else {
      p += std::min<std::size_t>(rng.between(1, spec.max_block), base.size() - p);
    }
  }
  return out;
}

void scatter_byte_changes(std::vector<std::uint8_t>& image, std::size_t count, Rng& rng) {
  if (count > image.size()) throw Error(Errc::invalid_input, "more changes than bytes");
  std::vector<std::uint8_t> touched(image.size(), 0);
  for (std::size_t done = 0; done < count;) {
    const auto at = static_cast<std::size_t>(rng.between(0, image.size() - 1));
    if (touched[at]) continue;
    touched[at] = 1;
    image[at] = static_cast<std::uint8_t>(image[at] ^ rng.between(1, 255));
    ++done;
  }
}

CorpusManifest write_corpus(const std::filesystem::path& dir, const CorpusSpec& spec) {
  std::filesystem::create_directories(dir);
  Rng rng(spec.seed);
  CorpusManifest manifest{spec.name, {}};
  std::vector<std::uint8_t> image = random_image(spec.image_bytes, rng);
  std::ofstream list(dir / "manifest.tsv", std::ios::binary | std::ios::trunc);
  if (!list) throw Error(Errc::io, "cannot write " + (dir / "manifest.tsv").string());

  for (std::size_t k = 0; k <= spec.steps.size(); ++k) {
    if (k > 0) image = mutate(image, spec.steps[k - 1], rng);
    const std::string file = "v" + std::to_string(k) + ".bin";
    write_file_atomic(dir / file, image);
    list << 'v' << k << '\t' << file << '\n';
    manifest.entries.push_back({"v" + std::to_string(k), dir / file});
  }
  if (!list.flush()) throw Error(Errc::io, "cannot write " + (dir / "manifest.tsv").string());
  return manifest;
}

}  // namespace bpatch::synth
