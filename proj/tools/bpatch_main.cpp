// bpatch: generate, apply and inspect bit-packed delta patches, estimate
// FUOTA cost, and benchmark corpora. Talks to the library only through the
// C interface.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bpatch/bpatch.h"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

int report(bpatch_status status, const std::string& context) {
  std::cerr << "bpatch: " << context << ": " << bpatch_status_string(status);
  const std::string detail = bpatch_last_error();
  if (!detail.empty()) std::cerr << ": " << detail;
  std::cerr << '\n';
  if (status == BPATCH_E_PATCH_TOO_LARGE) {
    std::cerr << "bpatch: the delta does not fit the patch format; send a full-image update instead\n";
  }
  return status == BPATCH_E_INVALID_ARGUMENT ? kExitUsage : kExitFailure;
}

struct ProfileHandle {
  bpatch_profile* ptr = nullptr;
  ProfileHandle() = default;
  ProfileHandle(const ProfileHandle&) = delete;
  ProfileHandle& operator=(const ProfileHandle&) = delete;
  ~ProfileHandle() { bpatch_profile_destroy(ptr); }
};

struct BenchHandle {
  bpatch_bench* ptr = nullptr;
  BenchHandle() = default;
  BenchHandle(const BenchHandle&) = delete;
  BenchHandle& operator=(const BenchHandle&) = delete;
  ~BenchHandle() { bpatch_bench_destroy(ptr); }
};

void print_estimate(const char* label, const bpatch_estimate& e) {
  std::printf("%-12s fragments=%llu  time=%.2f min  energy=%.3f mAh\n", label,
              static_cast<unsigned long long>(e.fragments), e.duration_s / 60.0, e.energy_mAh);
}

std::string format_ratio(double ratio) {
  if (std::isinf(ratio)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", ratio);
  return buf;
}

int cmd_diff(const std::string& old_path, const std::string& new_path, const std::string& out_path,
             const std::string& mode, uint32_t cutoff) {
  bpatch_diff_options options{mode == "fast" ? BPATCH_MODE_FAST : BPATCH_MODE_MINIMAL, cutoff};
  bpatch_diff_result result{};
  if (auto st = bpatch_diff_files(old_path.c_str(), new_path.c_str(), out_path.c_str(), &options, &result)) {
    return report(st, "diff");
  }
  std::printf("patch_bytes=%llu\n", static_cast<unsigned long long>(result.patch_bytes));
  std::printf("old_bytes=%llu new_bytes=%llu\n", static_cast<unsigned long long>(result.old_bytes),
              static_cast<unsigned long long>(result.new_bytes));
  std::printf("compression_factor=%.2f\n", result.compression_factor);
  if (result.new_bytes > 0) std::printf("scenario=%s\n", bpatch_scenario_name(result.scenario));
  return 0;
}

int cmd_apply(const std::string& old_path, const std::string& patch_path, const std::string& out_path,
              const std::string& expect_sha) {
  uint64_t written = 0;
  if (auto st = bpatch_apply_files(old_path.c_str(), patch_path.c_str(), out_path.c_str(),
                                   expect_sha.empty() ? nullptr : expect_sha.c_str(), &written)) {
    return report(st, "apply");
  }
  std::printf("bytes_written=%llu\n", static_cast<unsigned long long>(written));
  return 0;
}

int cmd_info(const std::string& patch_path) {
  bpatch_patch_info info{};
  if (auto st = bpatch_inspect_file(patch_path.c_str(), &info)) return report(st, "info");
  std::printf("patch_bytes=%llu\n", static_cast<unsigned long long>(info.patch_bytes));
  std::printf("body_bits=%u\n", info.body_bits);
  std::printf("WNBD=%u WNBC=%u WNBA=%u\n", info.wnbd_meta, info.wnbc_meta, info.wnba_meta);
  std::printf("triples=%llu\n", static_cast<unsigned long long>(info.triples));
  std::printf("discarded=%llu copied=%llu added=%llu\n", static_cast<unsigned long long>(info.discarded),
              static_cast<unsigned long long>(info.copied), static_cast<unsigned long long>(info.added));
  std::printf("output_bytes=%llu\n", static_cast<unsigned long long>(info.copied + info.added));
  return 0;
}

int cmd_estimate(const std::string& image_path, int64_t image_size, const std::string& patch_path,
                 int64_t patch_size, const std::string& profile_path, const std::vector<std::string>& overrides) {
  ProfileHandle profile;
  if (auto st = bpatch_profile_create(&profile.ptr)) return report(st, "estimate");
  if (!profile_path.empty()) {
    if (auto st = bpatch_profile_load(profile.ptr, profile_path.c_str())) return report(st, "profile");
  }
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "bpatch: --set expects key=value, got '" << kv << "'\n";
      return kExitUsage;
    }
    if (auto st = bpatch_profile_set(profile.ptr, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str())) {
      return report(st, "profile");
    }
  }

  uint64_t image_bytes = 0;
  if (!image_path.empty()) {
    if (auto st = bpatch_file_size(image_path.c_str(), &image_bytes)) return report(st, "estimate");
  } else if (image_size >= 0) {
    image_bytes = static_cast<uint64_t>(image_size);
  } else {
    std::cerr << "bpatch: estimate needs --image-size or --image\n";
    return kExitUsage;
  }

  bool have_patch = false;
  uint64_t patch_bytes = 0;
  if (!patch_path.empty()) {
    if (auto st = bpatch_file_size(patch_path.c_str(), &patch_bytes)) return report(st, "estimate");
    have_patch = true;
  } else if (patch_size >= 0) {
    patch_bytes = static_cast<uint64_t>(patch_size);
    have_patch = true;
  }

  if (!have_patch) {
    bpatch_estimate e{};
    if (auto st = bpatch_estimate_update(profile.ptr, image_bytes, &e)) return report(st, "estimate");
    print_estimate("full-image", e);
    return 0;
  }

  bpatch_savings s{};
  if (auto st = bpatch_compare_strategies(profile.ptr, image_bytes, patch_bytes, &s)) return report(st, "estimate");
  print_estimate("full-image", s.full);
  print_estimate("incremental", s.incremental);
  std::printf("time_ratio=%s\n", format_ratio(s.time_ratio).c_str());
  std::printf("energy_saving=%.3f mAh\n", s.energy_saving_mAh);
  std::printf("reconstruction=%.4f mAh\n", s.reconstruction_mAh);
  std::printf("net_saving=%.3f mAh\n", s.net_saving_mAh);
  if (image_bytes > 0) {
    bpatch_scenario scenario{};
    if (bpatch_classify(patch_bytes, image_bytes, &scenario) == BPATCH_OK) {
      std::printf("scenario=%s\n", bpatch_scenario_name(scenario));
    }
  }
  return 0;
}

int cmd_bench(const std::string& manifest, const std::vector<std::string>& modes, const std::string& format,
              const std::string& out_path, bool timings, uint32_t cutoff) {
  unsigned mask = 0;
  for (const auto& m : modes) mask |= 1u << (m == "fast" ? BPATCH_MODE_FAST : BPATCH_MODE_MINIMAL);

  BenchHandle bench;
  if (auto st = bpatch_bench_run(manifest.c_str(), mask, cutoff, &bench.ptr)) return report(st, "bench");
  bpatch_buffer text{};
  if (auto st = bpatch_bench_report(bench.ptr, format == "json" ? BPATCH_REPORT_JSON : BPATCH_REPORT_CSV,
                                    timings ? 1 : 0, &text)) {
    return report(st, "bench");
  }
  int rc = 0;
  if (out_path.empty() || out_path == "-") {
    std::fwrite(text.data, 1, text.size, stdout);
  } else {
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(text.data), static_cast<std::streamsize>(text.size));
    if (!out.flush()) {
      std::cerr << "bpatch: bench: cannot write " << out_path << '\n';
      rc = kExitFailure;
    } else {
      std::fprintf(stderr, "bpatch: %zu rows written to %s\n", bpatch_bench_row_count(bench.ptr), out_path.c_str());
    }
  }
  bpatch_buffer_free(&text);
  return rc;
}

int cmd_synth(const std::string& dir, uint64_t size, uint64_t seed, const std::vector<double>& rates) {
  if (auto st = bpatch_synth_corpus(dir.c_str(), size, seed, rates.data(), rates.size())) return report(st, "synth");
  std::printf("%s/manifest.tsv\n", dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bpatch: bit-packed COPY/ADD delta patches for firmware updates"};
  app.require_subcommand(1);
  app.set_version_flag("--version", bpatch_version());

  std::string old_path, new_path, out_path, patch_path, mode = "minimal";
  uint32_t cutoff = 0;

  auto* diff = app.add_subcommand("diff", "Generate a .bpatch turning OLD into NEW");
  diff->add_option("old", old_path, "Old image")->required();
  diff->add_option("new", new_path, "New image")->required();
  diff->add_option("patch", out_path, "Output patch")->required();
  diff->add_option("--mode", mode, "Diff mode")->check(CLI::IsMember({"minimal", "fast"}))->capture_default_str();
  diff->add_option("--cutoff", cutoff, "Fast-mode edit-cost cutoff (0 = default)");

  std::string expect_sha;
  auto* apply = app.add_subcommand("apply", "Rebuild NEW from OLD and a patch");
  apply->add_option("old", old_path, "Old image")->required();
  apply->add_option("patch", patch_path, "Patch file")->required();
  apply->add_option("out", out_path, "Output image")->required();
  apply->add_option("--expect-sha", expect_sha, "Expected SHA-256 (hex) of the output");

  auto* info = app.add_subcommand("info", "Show patch header and opcode statistics");
  info->add_option("patch", patch_path, "Patch file")->required();

  std::string image_path, profile_path;
  int64_t image_size = -1, patch_size = -1;
  std::vector<std::string> overrides;
  auto* estimate = app.add_subcommand("estimate", "Estimate FUOTA fragments, time and energy");
  auto* size_opt = estimate->add_option("--image-size", image_size, "Full image size in bytes")->check(CLI::NonNegativeNumber);
  estimate->add_option("--image", image_path, "Full image file")->excludes(size_opt);
  auto* psize_opt = estimate->add_option("--patch-size", patch_size, "Patch size in bytes")->check(CLI::NonNegativeNumber);
  estimate->add_option("--patch", patch_path, "Patch file")->excludes(psize_opt);
  estimate->add_option("--profile", profile_path, "Link profile (key = value lines)");
  estimate->add_option("--set", overrides, "Override one profile key (key=value)");

  std::string manifest, format = "csv";
  std::vector<std::string> modes{"minimal", "fast"};
  bool timings = false;
  auto* bench = app.add_subcommand("bench", "Benchmark consecutive versions of a corpus");
  bench->add_option("manifest", manifest, "Manifest: label<TAB>path per line")->required();
  bench->add_option("--modes", modes, "Diff modes")->delimiter(',')->check(CLI::IsMember({"minimal", "fast"}));
  bench->add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "json"}));
  bench->add_option("--out", out_path, "Report file (default stdout)");
  bench->add_flag("--timings", timings, "Include diff wall-clock columns (non-deterministic)");
  bench->add_option("--cutoff", cutoff, "Fast-mode edit-cost cutoff (0 = default)");

  std::string synth_dir;
  uint64_t synth_size = 64 * 1024, seed = 1;
  std::vector<double> rates{0.0001, 0.02, 0.3};
  auto* synth = app.add_subcommand("synth", "Write a synthetic version chain and manifest");
  synth->add_option("dir", synth_dir, "Output directory")->required();
  synth->add_option("--size", synth_size, "Base image size in bytes");
  synth->add_option("--seed", seed, "Generator seed");
  synth->add_option("--rates", rates, "Mutation rate per step")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  if (*diff) return cmd_diff(old_path, new_path, out_path, mode, cutoff);
  if (*apply) return cmd_apply(old_path, patch_path, out_path, expect_sha);
  if (*info) return cmd_info(patch_path);
  if (*estimate) return cmd_estimate(image_path, image_size, patch_path, patch_size, profile_path, overrides);
  if (*bench) return cmd_bench(manifest, modes, format, out_path, timings, cutoff);
  if (*synth) return cmd_synth(synth_dir, synth_size, seed, rates);
  return kExitUsage;
}
