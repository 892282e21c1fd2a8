#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "bpatch/bench.hpp"
#include "bpatch/error.hpp"
#include "bpatch/io.hpp"
#include "bpatch/synth.hpp"

using namespace bpatch;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::io;
}

BenchRow row_with(Scenario scenario, double minimal_factor, double fast_factor) {
  BenchRow row;
  row.old_label = "a";
  row.new_label = "b";
  row.scenario = scenario;
  row.minimal = ModeResult{1, minimal_factor, 0};
  row.fast = ModeResult{1, fast_factor, 0};
  return row;
}

}  // namespace

TEST_CASE("manifest parsing") {
  const auto m = parse_manifest("# corpus\nv1\tfirst.bin\n\nv2\t/abs/second.bin\r\n", "demo", "/base");
  CHECK(m.name == "demo");
  REQUIRE(m.entries.size() == 2);
  CHECK(m.entries[0] == CorpusEntry{"v1", fs::path("/base/first.bin")});
  CHECK(m.entries[1] == CorpusEntry{"v2", fs::path("/abs/second.bin")});

  CHECK(code_of([] { parse_manifest("", "x", "."); }) == Errc::invalid_input);
  CHECK(code_of([] { parse_manifest("only\tone.bin\n", "x", "."); }) == Errc::invalid_input);
  CHECK(code_of([] { parse_manifest("v1 a.bin\nv2\tb.bin\n", "x", "."); }) == Errc::invalid_input);
}

TEST_CASE("run_corpus pairs consecutive versions and verifies every patch") {
  TempDir dir("bpatch_bench_pairs");
  synth::CorpusSpec spec;
  spec.image_bytes = 8192;
  spec.steps = {{0.001}, {0.05}, {0.4}};
  const auto manifest = synth::write_corpus(dir.path, spec);
  const auto rows = run_corpus(manifest);
  REQUIRE(rows.size() == 3);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& row = rows[k];
    CHECK(row.pair() == "v" + std::to_string(k) + "->v" + std::to_string(k + 1));
    REQUIRE(row.minimal);
    REQUIRE(row.fast);
    CHECK(row.minimal->factor * static_cast<double>(row.minimal->patch_bytes) ==
          doctest::Approx(static_cast<double>(row.new_bytes)).epsilon(1e-15));
    CHECK(row.scenario == classify_scenario(row.minimal->patch_bytes, row.new_bytes));
  }

  const auto loaded = load_manifest(dir.path / "manifest.tsv");
  CHECK(loaded.name == "manifest");
  CHECK(loaded.entries.size() == 4);
}

TEST_CASE("identical versions give a header-plus-one-copy patch") {
  TempDir dir("bpatch_bench_identical");
  synth::Rng rng(5);
  const auto image = synth::random_image(100 * 1024, rng);
  write_file_atomic(dir.path / "a.bin", image);
  write_file_atomic(dir.path / "b.bin", image);
  const auto manifest = parse_manifest("a\ta.bin\nb\tb.bin\n", "same", dir.path);
  const auto rows = run_corpus(manifest);
  REQUIRE(rows.size() == 1);
  // copy = 102400 has width 17; WNBC = width(17) = 5.
  CHECK(rows[0].minimal->patch_bytes == 6 + (5 + 17 + 7) / 8);
  CHECK(rows[0].minimal->factor > 100);
  CHECK(rows[0].scenario == Scenario::NU);
}

TEST_CASE("run_corpus names the failing pair") {
  TempDir dir("bpatch_bench_missing");
  write_file_atomic(dir.path / "a.bin", std::vector<std::uint8_t>{1, 2, 3});
  const auto manifest = parse_manifest("a\ta.bin\nb\tmissing.bin\n", "x", dir.path);
  try {
    run_corpus(manifest);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::io);
    CHECK(std::string(e.what()).find("a->b") != std::string::npos);
  }
  BenchOptions none;
  none.minimal = none.fast = false;
  CHECK(code_of([&] { run_corpus(manifest, none); }) == Errc::invalid_input);
}

TEST_CASE("aggregate") {
  const auto single = aggregate({row_with(Scenario::MN, 12, 10)});
  REQUIRE(single.size() == 2);
  CHECK(single[0].mean_factor == 12);
  CHECK(single[1].mean_factor == 10);

  const auto nu = aggregate({row_with(Scenario::NU, 600, 600), row_with(Scenario::NU, 700, 700)});
  CHECK(nu[0].scenario == Scenario::NU);
  CHECK(nu[0].mean_factor == 650);

  std::vector<BenchRow> mixed{row_with(Scenario::NU, 500, 400), row_with(Scenario::MJ, 2, 1),
                              row_with(Scenario::MN, 20, 18), row_with(Scenario::MJ, 4, 3)};
  mixed[2].fast.reset();
  const auto groups = aggregate(mixed);
  std::size_t minimal_rows = 0, fast_rows = 0;
  for (const auto& g : groups) (g.mode == DiffMode::Kind::minimal ? minimal_rows : fast_rows) += g.rows;
  CHECK(minimal_rows == 4);
  CHECK(fast_rows == 3);
  CHECK(groups.size() == 5);
  CHECK(groups.back().scenario == Scenario::MJ);
  CHECK(groups.back().mean_factor == 2);
}

TEST_CASE("emit_report") {
  const std::string empty_csv = emit_report({}, {}, ReportFormat::csv);
  CHECK(empty_csv ==
        "pair,old_label,new_label,old_bytes,new_bytes,minimal_patch_bytes,minimal_factor,fast_patch_bytes,"
        "fast_factor,scenario\n");
  const auto empty_json = nlohmann::json::parse(emit_report({}, {}, ReportFormat::json));
  CHECK(empty_json["rows"].is_array());
  CHECK(empty_json["rows"].empty());

  BenchRow row;
  row.old_label = "v1";
  row.new_label = "v2";
  row.old_bytes = 1000;
  row.new_bytes = 1003;
  row.minimal = ModeResult{30, 1003.0 / 30.0, 1.5};
  row.scenario = Scenario::MN;
  const std::vector<BenchRow> rows{row};
  const auto aggs = aggregate(rows);

  const std::string json_text = emit_report(rows, aggs, ReportFormat::json, {"demo", false});
  const auto doc = nlohmann::json::parse(json_text);
  CHECK(doc["corpus"] == "demo");
  REQUIRE(doc["rows"].size() == 1);
  const auto& r = doc["rows"][0];
  CHECK(r["pair"] == "v1->v2");
  CHECK(r["old_bytes"] == 1000);
  CHECK(r["new_bytes"] == 1003);
  CHECK(r["scenario"] == "MN");
  CHECK(r["minimal"]["patch_bytes"] == 30);
  CHECK(r["minimal"]["factor"].get<double>() == 1003.0 / 30.0);
  CHECK_FALSE(r["minimal"].contains("diff_ms"));
  CHECK_FALSE(r.contains("fast"));
  CHECK(doc["aggregates"][0]["mean_factor"].get<double>() == 1003.0 / 30.0);

  CHECK(emit_report(rows, aggs, ReportFormat::json, {"demo", false}) == json_text);
  const std::string csv = emit_report(rows, aggs, ReportFormat::csv);
  CHECK(csv == emit_report(rows, aggs, ReportFormat::csv));
  CHECK(csv.find("v1->v2,v1,v2,1000,1003,30,33.43333333333333,,,MN\n") != std::string::npos);
  CHECK(csv.find("\nscenario,mode,rows,mean_factor\nMN,minimal,1,33.43333333333333\n") != std::string::npos);

  const std::string timed = emit_report(rows, aggs, ReportFormat::csv, {"demo", true});
  CHECK(timed.find("minimal_diff_ms,fast_diff_ms") != std::string::npos);
  CHECK(timed.find(",MN,1.5,\n") != std::string::npos);
}

TEST_CASE("synthetic NU corpus compresses by orders of magnitude") {
  synth::Rng rng(77);
  auto base = synth::random_image(128 * 1024, rng);
  auto next = base;
  synth::scatter_byte_changes(next, 16, rng);
  std::size_t changed = 0;
  for (std::size_t i = 0; i < base.size(); ++i) changed += base[i] != next[i];
  CHECK(changed == 16);

  TempDir dir("bpatch_bench_nu");
  write_file_atomic(dir.path / "a.bin", base);
  write_file_atomic(dir.path / "b.bin", next);
  const auto rows = run_corpus(parse_manifest("a\ta.bin\nb\tb.bin\n", "nu", dir.path));
  CHECK(rows[0].scenario == Scenario::NU);
  CHECK(rows[0].minimal->factor >= 500);
}

TEST_CASE("synthetic generator is seed-deterministic") {
  synth::Rng a(9), b(9);
  const auto img_a = synth::random_image(4096, a);
  const auto img_b = synth::random_image(4096, b);
  CHECK(img_a == img_b);
  CHECK(synth::mutate(img_a, {0.1}, a) == synth::mutate(img_b, {0.1}, b));

  synth::Rng c(1);
  const auto base = synth::random_image(50000, c);
  const auto m = synth::mutate(base, {0.02, 1, 0, 0}, c);
  CHECK(m.size() == base.size());
  std::size_t flips = 0;
  for (std::size_t i = 0; i < m.size(); ++i) flips += m[i] != base[i];
  CHECK(flips > 700);
  CHECK(flips < 1300);
}
