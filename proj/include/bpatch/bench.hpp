#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bpatch/diff.hpp"
#include "bpatch/fuota.hpp"

namespace bpatch {

struct CorpusEntry {
  std::string label;
  std::filesystem::path path;

  friend bool operator==(const CorpusEntry&, const CorpusEntry&) = default;
};

struct CorpusManifest {
  std::string name;
  std::vector<CorpusEntry> entries;
};

// One `label<TAB>path` per line; blank lines and lines starting with `#` are
// skipped. Relative paths resolve against base_dir. Throws
// Errc::invalid_input for fewer than two entries or a malformed line.
CorpusManifest parse_manifest(std::string_view text, std::string name, const std::filesystem::path& base_dir);
CorpusManifest load_manifest(const std::filesystem::path& path);

struct BenchOptions {
  bool minimal = true;
  bool fast = true;
  std::uint32_t fast_cutoff = DiffMode::kDefaultCutoff;
};

struct ModeResult {
  std::uint64_t patch_bytes = 0;
  // new image size / patch size
  double factor = 0;
  double diff_ms = 0;
};

struct BenchRow {
  std::string old_label;
  std::string new_label;
  std::uint64_t old_bytes = 0;
  std::uint64_t new_bytes = 0;
  std::optional<ModeResult> minimal;
  std::optional<ModeResult> fast;
  // From the minimal-mode patch when that mode ran, else the fast one.
  Scenario scenario = Scenario::MN;

  std::string pair() const { return old_label + "->" + new_label; }
};

// Diffs every consecutive pair, verifies each patch against the new image
// and records its size. Any failure throws with the offending pair named;
// a patch that does not verify raises Errc::verification_failed.
std::vector<BenchRow> run_corpus(const CorpusManifest& manifest, const BenchOptions& options = {});

struct Aggregate {
  Scenario scenario = Scenario::MN;
  DiffMode::Kind mode = DiffMode::Kind::minimal;
  std::size_t rows = 0;
  double mean_factor = 0;
};

// Mean factor per (scenario, mode), ordered NU, MN, MJ then minimal, fast;
// empty groups are omitted.
std::vector<Aggregate> aggregate(const std::vector<BenchRow>& rows);

enum class ReportFormat { csv, json };

struct ReportOptions {
  std::string corpus;
  // Wall-clock columns make reports differ between runs.
  bool timings = false;
};

std::string emit_report(const std::vector<BenchRow>& rows, const std::vector<Aggregate>& aggregates,
                        ReportFormat format, const ReportOptions& options = {});

const char* mode_name(DiffMode::Kind kind) noexcept;

}  // namespace bpatch
