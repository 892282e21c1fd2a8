#include "bpatch/bpatch.h"

#include <cctype>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <new>
#include <string>
#include <string_view>

#include "bpatch/bench.hpp"
#include "bpatch/codec.hpp"
#include "bpatch/diff.hpp"
#include "bpatch/digest.hpp"
#include "bpatch/error.hpp"
#include "bpatch/fuota.hpp"
#include "bpatch/io.hpp"
#include "bpatch/reconstruct.hpp"
#include "bpatch/synth.hpp"

struct bpatch_profile {
  bpatch::LinkProfile value;
};

struct bpatch_bench {
  std::string corpus;
  std::vector<bpatch::BenchRow> rows;
};

namespace {

thread_local std::string g_last_error;

bpatch_status to_status(bpatch::Errc code) {
  using bpatch::Errc;
  switch (code) {
    case Errc::encoding_range:
      return BPATCH_E_ENCODING_RANGE;
    case Errc::truncated_stream:
      return BPATCH_E_TRUNCATED;
    case Errc::size_limit:
      return BPATCH_E_SIZE_LIMIT;
    case Errc::malformed_script:
      return BPATCH_E_MALFORMED_SCRIPT;
    case Errc::patch_too_large:
      return BPATCH_E_PATCH_TOO_LARGE;
    case Errc::malformed_patch:
      return BPATCH_E_MALFORMED_PATCH;
    case Errc::io:
      return BPATCH_E_IO;
    case Errc::verification_failed:
      return BPATCH_E_VERIFICATION_FAILED;
    case Errc::invalid_input:
      return BPATCH_E_INVALID_ARGUMENT;
    case Errc::config:
      return BPATCH_E_CONFIG;
  }
  return BPATCH_E_INTERNAL;
}

bpatch_status fail(bpatch_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs body, mapping exceptions onto status codes.
template <typename Body>
bpatch_status guarded(Body&& body) noexcept {
  g_last_error.clear();
  try {
    return body();
  } catch (const bpatch::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(BPATCH_E_INTERNAL, "out of memory");
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(BPATCH_E_IO, e.what());
  } catch (const std::exception& e) {
    return fail(BPATCH_E_INTERNAL, e.what());
  } catch (...) {
    return fail(BPATCH_E_INTERNAL, "unknown error");
  }
}

std::span<const std::uint8_t> bytes_of(const uint8_t* data, size_t size) {
  if (data == nullptr && size != 0) throw bpatch::Error(bpatch::Errc::invalid_input, "null data with non-zero size");
  return {data, size};
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw bpatch::Error(bpatch::Errc::invalid_input, std::string(what) + " must not be null");
}

void hand_over(std::span<const std::uint8_t> bytes, bpatch_buffer* out) {
  auto* data = static_cast<uint8_t*>(std::malloc(bytes.empty() ? 1 : bytes.size()));
  if (data == nullptr) throw std::bad_alloc();
  if (!bytes.empty()) std::memcpy(data, bytes.data(), bytes.size());
  out->data = data;
  out->size = bytes.size();
}

bpatch::DiffMode mode_of(const bpatch_diff_options* options) {
  if (options == nullptr) return bpatch::DiffMode::minimal();
  switch (options->mode) {
    case BPATCH_MODE_MINIMAL:
      return bpatch::DiffMode::minimal();
    case BPATCH_MODE_FAST:
      return bpatch::DiffMode::fast(options->fast_cutoff == 0 ? bpatch::DiffMode::kDefaultCutoff
                                                               : options->fast_cutoff);
  }
  throw bpatch::Error(bpatch::Errc::invalid_input, "unknown diff mode");
}

void fill(const bpatch::UpdateEstimate& e, bpatch_estimate* out) {
  out->fragments = e.fragments;
  out->duration_s = e.duration_s;
  out->energy_mAh = e.energy_mAh;
}

void fill(const bpatch::PatchInfo& info, bpatch_patch_info* out) {
  out->body_bits = info.header.body_bits;
  out->wnbd_meta = info.header.wnbd_meta;
  out->wnbc_meta = info.header.wnbc_meta;
  out->wnba_meta = info.header.wnba_meta;
  out->triples = info.triples;
  out->discarded = info.discarded;
  out->copied = info.copied;
  out->added = info.added;
  out->patch_bytes = info.patch_bytes;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

extern "C" {

const char* bpatch_version(void) { return "0.1.0"; }

const char* bpatch_last_error(void) { return g_last_error.c_str(); }

const char* bpatch_status_string(bpatch_status status) {
  switch (status) {
    case BPATCH_OK:
      return "ok";
    case BPATCH_E_INVALID_ARGUMENT:
      return "invalid argument";
    case BPATCH_E_ENCODING_RANGE:
      return "encoding range";
    case BPATCH_E_TRUNCATED:
      return "truncated input";
    case BPATCH_E_SIZE_LIMIT:
      return "size limit";
    case BPATCH_E_MALFORMED_SCRIPT:
      return "malformed script";
    case BPATCH_E_PATCH_TOO_LARGE:
      return "patch too large";
    case BPATCH_E_MALFORMED_PATCH:
      return "malformed patch";
    case BPATCH_E_IO:
      return "i/o error";
    case BPATCH_E_VERIFICATION_FAILED:
      return "verification failed";
    case BPATCH_E_CONFIG:
      return "bad configuration";
    case BPATCH_E_DIGEST_MISMATCH:
      return "digest mismatch";
    case BPATCH_E_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

void bpatch_buffer_free(bpatch_buffer* buffer) {
  if (buffer == nullptr) return;
  std::free(buffer->data);
  buffer->data = nullptr;
  buffer->size = 0;
}

bpatch_status bpatch_diff(const uint8_t* old_data, size_t old_size, const uint8_t* new_data, size_t new_size,
                          const bpatch_diff_options* options, bpatch_buffer* patch_out) {
  return guarded([&] {
    require(patch_out, "patch_out");
    const auto script = bpatch::compute_edit_script(bytes_of(old_data, old_size), bytes_of(new_data, new_size),
                                                    mode_of(options));
    hand_over(bpatch::encode_patch(script), patch_out);
    return BPATCH_OK;
  });
}

bpatch_status bpatch_apply(const uint8_t* old_data, size_t old_size, const uint8_t* patch, size_t patch_size,
                           bpatch_buffer* new_out) {
  return guarded([&] {
    require(new_out, "new_out");
    hand_over(bpatch::apply_patch(bytes_of(old_data, old_size), bytes_of(patch, patch_size)), new_out);
    return BPATCH_OK;
  });
}

bpatch_status bpatch_verify(const uint8_t* old_data, size_t old_size, const uint8_t* expected_new,
                            size_t expected_size, const uint8_t* patch, size_t patch_size, int* matches) {
  return guarded([&] {
    require(matches, "matches");
    const auto result = bpatch::verify(bytes_of(old_data, old_size), bytes_of(expected_new, expected_size),
                                       bytes_of(patch, patch_size));
    *matches = result.ok ? 1 : 0;
    g_last_error = result.diagnostic;
    return BPATCH_OK;
  });
}

bpatch_status bpatch_inspect(const uint8_t* patch, size_t patch_size, bpatch_patch_info* info_out) {
  return guarded([&] {
    require(info_out, "info_out");
    fill(bpatch::patch_info(bytes_of(patch, patch_size)), info_out);
    return BPATCH_OK;
  });
}

bpatch_status bpatch_diff_files(const char* old_path, const char* new_path, const char* patch_path,
                                const bpatch_diff_options* options, bpatch_diff_result* result_out) {
  return guarded([&] {
    require(old_path, "old_path");
    require(new_path, "new_path");
    require(patch_path, "patch_path");
    const auto old_bytes = bpatch::read_file(old_path);
    const auto new_bytes = bpatch::read_file(new_path);
    const auto patch = bpatch::encode_patch(bpatch::compute_edit_script(old_bytes, new_bytes, mode_of(options)));
    bpatch::write_file_atomic(patch_path, patch);
    if (result_out != nullptr) {
      result_out->old_bytes = old_bytes.size();
      result_out->new_bytes = new_bytes.size();
      result_out->patch_bytes = patch.size();
      result_out->compression_factor = static_cast<double>(new_bytes.size()) / static_cast<double>(patch.size());
      result_out->scenario = new_bytes.empty()
                                 ? BPATCH_SCENARIO_MJ
                                 : static_cast<bpatch_scenario>(bpatch::classify_scenario(patch.size(), new_bytes.size()));
    }
    return BPATCH_OK;
  });
}

bpatch_status bpatch_apply_files(const char* old_path, const char* patch_path, const char* out_path,
                                 const char* expect_sha256_hex, uint64_t* bytes_written) {
  return guarded([&] {
    require(old_path, "old_path");
    require(patch_path, "patch_path");
    require(out_path, "out_path");
    if (expect_sha256_hex != nullptr) {
      const std::string_view hex(expect_sha256_hex);
      if (hex.size() != 64 || hex.find_first_not_of("0123456789abcdefABCDEF") != std::string_view::npos) {
        throw bpatch::Error(bpatch::Errc::invalid_input, "expected SHA-256 must be 64 hex digits");
      }
    }
    const auto patch = bpatch::read_file(patch_path);
    std::ifstream old_stream(old_path, std::ios::binary);
    if (!old_stream) throw bpatch::Error(bpatch::Errc::io, std::string("cannot open ") + old_path);

    uint64_t written = 0;
    bool digest_mismatch = false;
    std::string actual;
    try {
      bpatch::write_file_atomic(out_path, [&](bpatch::ByteSink& sink) {
        bpatch::StreamSource source(old_stream);
        bpatch::HashingSink hashing(sink);
        written = bpatch::apply_patch(source, patch, hashing);
        if (expect_sha256_hex != nullptr) {
          actual = hashing.hex_digest();
          if (actual != lower(expect_sha256_hex)) {
            digest_mismatch = true;
            throw bpatch::Error(bpatch::Errc::verification_failed, "digest mismatch");
          }
        }
      });
    } catch (const bpatch::Error&) {
      if (digest_mismatch) {
        return fail(BPATCH_E_DIGEST_MISMATCH,
                    "output SHA-256 " + actual + " does not match expected " + std::string(expect_sha256_hex));
      }
      throw;
    }
    if (bytes_written != nullptr) *bytes_written = written;
    return BPATCH_OK;
  });
}

bpatch_status bpatch_inspect_file(const char* patch_path, bpatch_patch_info* info_out) {
  return guarded([&] {
    require(patch_path, "patch_path");
    require(info_out, "info_out");
    fill(bpatch::patch_info(bpatch::read_file(patch_path)), info_out);
    return BPATCH_OK;
  });
}

bpatch_status bpatch_sha256_file(const char* path, char hex_out[65]) {
  return guarded([&] {
    require(path, "path");
    require(hex_out, "hex_out");
    const std::string hex = bpatch::sha256_hex(bpatch::read_file(path));
    std::memcpy(hex_out, hex.c_str(), 65);
    return BPATCH_OK;
  });
}

bpatch_status bpatch_file_size(const char* path, uint64_t* size_out) {
  return guarded([&] {
    require(path, "path");
    require(size_out, "size_out");
    std::error_code ec;
    const auto size = std::filesystem::file_size(path, ec);
    if (ec) throw bpatch::Error(bpatch::Errc::io, std::string("cannot stat ") + path + ": " + ec.message());
    *size_out = size;
    return BPATCH_OK;
  });
}

bpatch_status bpatch_profile_create(bpatch_profile** profile_out) {
  return guarded([&] {
    require(profile_out, "profile_out");
    *profile_out = new bpatch_profile{};
    return BPATCH_OK;
  });
}

void bpatch_profile_destroy(bpatch_profile* profile) { delete profile; }

bpatch_status bpatch_profile_load(bpatch_profile* profile, const char* path) {
  return guarded([&] {
    require(profile, "profile");
    require(path, "path");
    profile->value = bpatch::load_profile(path, profile->value);
    return BPATCH_OK;
  });
}

bpatch_status bpatch_profile_set(bpatch_profile* profile, const char* key, const char* value) {
  return guarded([&] {
    require(profile, "profile");
    require(key, "key");
    require(value, "value");
    bpatch::LinkProfile next = profile->value;
    next.set(key, value);
    next.validate();
    profile->value = next;
    return BPATCH_OK;
  });
}

bpatch_status bpatch_profile_get(const bpatch_profile* profile, const char* key, double* value_out) {
  return guarded([&] {
    require(profile, "profile");
    require(key, "key");
    require(value_out, "value_out");
    const auto& p = profile->value;
    const std::string k = key;
    if (k == "payload_bytes_per_fragment") {
      *value_out = p.payload_bytes_per_fragment;
    } else if (k == "downlink_interval_s") {
      *value_out = p.downlink_interval_s;
    } else if (k == "class_c_current_uA") {
      *value_out = p.class_c_current_uA;
    } else if (k == "class_a_current_uA") {
      *value_out = p.class_a_current_uA;
    } else if (k == "fragment_rx_current_uA") {
      *value_out = p.fragment_rx_current_uA;
    } else if (k == "fragment_rx_time_ms") {
      *value_out = p.fragment_rx_time_ms;
    } else if (k == "redundancy_fraction") {
      *value_out = p.redundancy_fraction;
    } else if (k == "supply_voltage_v") {
      *value_out = p.supply_voltage_v;
    } else if (k == "spreading_factor") {
      *value_out = p.spreading_factor;
    } else if (k == "reconstruction_energy_uAh") {
      *value_out = p.reconstruction_energy_uAh;
    } else {
      throw bpatch::Error(bpatch::Errc::config, "unknown profile key '" + k + "'");
    }
    return BPATCH_OK;
  });
}

bpatch_status bpatch_estimate_update(const bpatch_profile* profile, uint64_t image_bytes,
                                     bpatch_estimate* estimate_out) {
  return guarded([&] {
    require(profile, "profile");
    require(estimate_out, "estimate_out");
    fill(bpatch::estimate_update(image_bytes, profile->value), estimate_out);
    return BPATCH_OK;
  });
}

bpatch_status bpatch_estimate_fragments(const bpatch_profile* profile, uint64_t fragments,
                                        bpatch_estimate* estimate_out) {
  return guarded([&] {
    require(profile, "profile");
    require(estimate_out, "estimate_out");
    fill(bpatch::estimate_fragments(fragments, profile->value), estimate_out);
    return BPATCH_OK;
  });
}

bpatch_status bpatch_compare_strategies(const bpatch_profile* profile, uint64_t full_image_bytes,
                                        uint64_t patch_bytes, bpatch_savings* savings_out) {
  return guarded([&] {
    require(profile, "profile");
    require(savings_out, "savings_out");
    const auto s = bpatch::compare_strategies(full_image_bytes, patch_bytes, profile->value);
    fill(s.full, &savings_out->full);
    fill(s.incremental, &savings_out->incremental);
    savings_out->time_ratio = s.time_ratio;
    savings_out->energy_saving_mAh = s.energy_saving_mAh;
    savings_out->reconstruction_mAh = s.reconstruction_mAh;
    savings_out->net_saving_mAh = s.net_saving_mAh();
    return BPATCH_OK;
  });
}

bpatch_status bpatch_classify(uint64_t patch_bytes, uint64_t image_bytes, bpatch_scenario* scenario_out) {
  return guarded([&] {
    require(scenario_out, "scenario_out");
    *scenario_out = static_cast<bpatch_scenario>(bpatch::classify_scenario(patch_bytes, image_bytes));
    return BPATCH_OK;
  });
}

const char* bpatch_scenario_name(bpatch_scenario scenario) {
  return bpatch::scenario_name(static_cast<bpatch::Scenario>(scenario));
}

bpatch_status bpatch_bench_run(const char* manifest_path, unsigned modes, uint32_t fast_cutoff,
                               bpatch_bench** bench_out) {
  return guarded([&] {
    require(manifest_path, "manifest_path");
    require(bench_out, "bench_out");
    bpatch::BenchOptions options;
    options.minimal = (modes & (1u << BPATCH_MODE_MINIMAL)) != 0;
    options.fast = (modes & (1u << BPATCH_MODE_FAST)) != 0;
    if (fast_cutoff != 0) options.fast_cutoff = fast_cutoff;
    const auto manifest = bpatch::load_manifest(manifest_path);
    auto bench = std::make_unique<bpatch_bench>();
    bench->corpus = manifest.name;
    bench->rows = bpatch::run_corpus(manifest, options);
    *bench_out = bench.release();
    return BPATCH_OK;
  });
}

void bpatch_bench_destroy(bpatch_bench* bench) { delete bench; }

size_t bpatch_bench_row_count(const bpatch_bench* bench) { return bench == nullptr ? 0 : bench->rows.size(); }

bpatch_status bpatch_bench_report(const bpatch_bench* bench, bpatch_report_format format, int timings,
                                  bpatch_buffer* report_out) {
  return guarded([&] {
    require(bench, "bench");
    require(report_out, "report_out");
    bpatch::ReportOptions options{bench->corpus, timings != 0};
    const auto fmt = format == BPATCH_REPORT_JSON ? bpatch::ReportFormat::json : bpatch::ReportFormat::csv;
    const std::string text = bpatch::emit_report(bench->rows, bpatch::aggregate(bench->rows), fmt, options);
    hand_over({reinterpret_cast<const std::uint8_t*>(text.data()), text.size()}, report_out);
    return BPATCH_OK;
  });
}

bpatch_status bpatch_synth_corpus(const char* dir, uint64_t image_bytes, uint64_t seed, const double* rates,
                                  size_t steps) {
  return guarded([&] {
    require(dir, "dir");
    if (steps == 0) throw bpatch::Error(bpatch::Errc::invalid_input, "need at least one step");
    require(rates, "rates");
    bpatch::synth::CorpusSpec spec;
    spec.image_bytes = static_cast<std::size_t>(image_bytes);
    spec.seed = seed;
    for (size_t k = 0; k < steps; ++k) {
      bpatch::synth::MutationSpec m;
      m.rate = rates[k];
      spec.steps.push_back(m);
    }
    bpatch::synth::write_corpus(dir, spec);
    return BPATCH_OK;
  });
}

}  // extern "C"
