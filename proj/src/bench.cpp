#include "bpatch/bench.hpp"

#include <chrono>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bpatch/codec.hpp"
#include "bpatch/error.hpp"
#include "bpatch/io.hpp"
#include "bpatch/reconstruct.hpp"

namespace bpatch {

namespace {

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

ModeResult measure(std::span<const std::uint8_t> old_bytes, std::span<const std::uint8_t> new_bytes, DiffMode mode) {
  const auto start = std::chrono::steady_clock::now();
  const EditScript script = compute_edit_script(old_bytes, new_bytes, mode);
  const auto stop = std::chrono::steady_clock::now();
  const std::vector<std::uint8_t> patch = encode_patch(script);

  if (auto check = verify(old_bytes, new_bytes, patch); !check) {
    throw Error(Errc::verification_failed, std::string(mode_name(mode.kind)) + " patch does not verify: " +
                                               check.diagnostic);
  }
  ModeResult result;
  result.patch_bytes = patch.size();
  result.factor = static_cast<double>(new_bytes.size()) / static_cast<double>(patch.size());
  result.diff_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  return result;
}

}  // namespace

const char* mode_name(DiffMode::Kind kind) noexcept { return kind == DiffMode::Kind::minimal ? "minimal" : "fast"; }

CorpusManifest parse_manifest(std::string_view text, std::string name, const std::filesystem::path& base_dir) {
  CorpusManifest manifest{std::move(name), {}};
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;

    const auto tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0 || tab + 1 == line.size()) {
      throw Error(Errc::invalid_input, "manifest line " + std::to_string(line_no) + ": expected label<TAB>path");
    }
    std::filesystem::path path(std::string(line.substr(tab + 1)));
    if (path.is_relative()) path = base_dir / path;
    manifest.entries.push_back({std::string(line.substr(0, tab)), std::move(path)});
  }
  if (manifest.entries.size() < 2) {
    throw Error(Errc::invalid_input, "manifest needs at least two versions, found " +
                                         std::to_string(manifest.entries.size()));
  }
  return manifest;
}

CorpusManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open manifest " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_manifest(text.str(), path.stem().string(), path.parent_path());
}

std::vector<BenchRow> run_corpus(const CorpusManifest& manifest, const BenchOptions& options) {
  if (!options.minimal && !options.fast) throw Error(Errc::invalid_input, "no diff mode selected");
  if (manifest.entries.size() < 2) throw Error(Errc::invalid_input, "manifest needs at least two versions");

  std::vector<BenchRow> rows;
  std::vector<std::uint8_t> old_bytes = read_file(manifest.entries.front().path);
  for (std::size_t k = 1; k < manifest.entries.size(); ++k) {
    const auto& prev = manifest.entries[k - 1];
    const auto& next = manifest.entries[k];
    BenchRow row;
    row.old_label = prev.label;
    row.new_label = next.label;
    try {
      std::vector<std::uint8_t> new_bytes = read_file(next.path);
      row.old_bytes = old_bytes.size();
      row.new_bytes = new_bytes.size();
      if (options.minimal) row.minimal = measure(old_bytes, new_bytes, DiffMode::minimal());
      if (options.fast) row.fast = measure(old_bytes, new_bytes, DiffMode::fast(options.fast_cutoff));
      const ModeResult& basis = row.minimal ? *row.minimal : *row.fast;
      row.scenario = classify_scenario(basis.patch_bytes, row.new_bytes);
      old_bytes = std::move(new_bytes);
    } catch (const Error& e) {
      throw Error(e.code(), "pair " + row.pair() + ": " + e.what());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<Aggregate> aggregate(const std::vector<BenchRow>& rows) {
  std::vector<Aggregate> out;
  for (Scenario scenario : {Scenario::NU, Scenario::MN, Scenario::MJ}) {
    for (DiffMode::Kind mode : {DiffMode::Kind::minimal, DiffMode::Kind::fast}) {
      Aggregate agg{scenario, mode, 0, 0.0};
      double sum = 0;
      for (const auto& row : rows) {
        if (row.scenario != scenario) continue;
        const auto& result = mode == DiffMode::Kind::minimal ? row.minimal : row.fast;
        if (!result) continue;
        sum += result->factor;
        ++agg.rows;
      }
      if (agg.rows == 0) continue;
      agg.mean_factor = sum / static_cast<double>(agg.rows);
      out.push_back(agg);
    }
  }
  return out;
}

namespace {

std::string emit_csv(const std::vector<BenchRow>& rows, const std::vector<Aggregate>& aggregates,
                     const ReportOptions& options) {
  std::ostringstream out;
  out << "pair,old_label,new_label,old_bytes,new_bytes,minimal_patch_bytes,minimal_factor,fast_patch_bytes,"
         "fast_factor,scenario";
  if (options.timings) out << ",minimal_diff_ms,fast_diff_ms";
  out << '\n';
  auto cells = [&](const std::optional<ModeResult>& r) {
    if (r) {
      out << ',' << r->patch_bytes << ',' << format_double(r->factor);
    } else {
      out << ",,";
    }
  };
  for (const auto& row : rows) {
    out << row.pair() << ',' << row.old_label << ',' << row.new_label << ',' << row.old_bytes << ','
        << row.new_bytes;
    cells(row.minimal);
    cells(row.fast);
    out << ',' << scenario_name(row.scenario);
    if (options.timings) {
      out << ',' << (row.minimal ? format_double(row.minimal->diff_ms) : "");
      out << ',' << (row.fast ? format_double(row.fast->diff_ms) : "");
    }
    out << '\n';
  }
  if (!aggregates.empty()) {
    out << "\nscenario,mode,rows,mean_factor\n";
    for (const auto& a : aggregates) {
      out << scenario_name(a.scenario) << ',' << mode_name(a.mode) << ',' << a.rows << ','
          << format_double(a.mean_factor) << '\n';
    }
  }
  return out.str();
}

std::string emit_json(const std::vector<BenchRow>& rows, const std::vector<Aggregate>& aggregates,
                      const ReportOptions& options) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["corpus"] = options.corpus;
  doc["rows"] = ordered_json::array();
  for (const auto& row : rows) {
    ordered_json r;
    r["pair"] = row.pair();
    r["old_label"] = row.old_label;
    r["new_label"] = row.new_label;
    r["old_bytes"] = row.old_bytes;
    r["new_bytes"] = row.new_bytes;
    r["scenario"] = scenario_name(row.scenario);
    for (auto kind : {DiffMode::Kind::minimal, DiffMode::Kind::fast}) {
      const auto& result = kind == DiffMode::Kind::minimal ? row.minimal : row.fast;
      if (!result) continue;
      ordered_json m;
      m["patch_bytes"] = result->patch_bytes;
      m["factor"] = result->factor;
      if (options.timings) m["diff_ms"] = result->diff_ms;
      r[mode_name(kind)] = std::move(m);
    }
    doc["rows"].push_back(std::move(r));
  }
  doc["aggregates"] = ordered_json::array();
  for (const auto& a : aggregates) {
    doc["aggregates"].push_back(ordered_json{{"scenario", scenario_name(a.scenario)},
                                             {"mode", mode_name(a.mode)},
                                             {"rows", a.rows},
                                             {"mean_factor", a.mean_factor}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace

std::string emit_report(const std::vector<BenchRow>& rows, const std::vector<Aggregate>& aggregates,
                        ReportFormat format, const ReportOptions& options) {
  return format == ReportFormat::csv ? emit_csv(rows, aggregates, options) : emit_json(rows, aggregates, options);
}

}  // namespace bpatch
