#include "bpatch/fuota.hpp"

#include <charconv>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "bpatch/error.hpp"

namespace bpatch {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw Error(Errc::config, "bad value '" + std::string(text) + "' for " + std::string(key));
  }
  return value;
}

void require_positive(double value, const char* name) {
  if (!(value > 0) || !std::isfinite(value)) throw Error(Errc::config, std::string(name) + " must be positive");
}

}  // namespace

void LinkProfile::validate() const {
  if (payload_bytes_per_fragment == 0) throw Error(Errc::config, "payload_bytes_per_fragment must be at least 1");
  require_positive(downlink_interval_s, "downlink_interval_s");
  require_positive(class_c_current_uA, "class_c_current_uA");
  require_positive(class_a_current_uA, "class_a_current_uA");
  require_positive(fragment_rx_current_uA, "fragment_rx_current_uA");
  require_positive(fragment_rx_time_ms, "fragment_rx_time_ms");
  require_positive(supply_voltage_v, "supply_voltage_v");
  if (!(redundancy_fraction >= 0) || !std::isfinite(redundancy_fraction)) {
    throw Error(Errc::config, "redundancy_fraction must be non-negative");
  }
  if (!(reconstruction_energy_uAh >= 0) || !std::isfinite(reconstruction_energy_uAh)) {
    throw Error(Errc::config, "reconstruction_energy_uAh must be non-negative");
  }
  if (fragment_rx_time_ms / 1000.0 > downlink_interval_s) {
    throw Error(Errc::config, "fragment_rx_time_ms exceeds the downlink interval");
  }
}

void LinkProfile::set(std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "payload_bytes_per_fragment") {
    payload_bytes_per_fragment = parse_number<std::uint32_t>(key, value);
  } else if (key == "downlink_interval_s") {
    downlink_interval_s = parse_number<double>(key, value);
  } else if (key == "class_c_current_uA") {
    class_c_current_uA = parse_number<double>(key, value);
  } else if (key == "class_a_current_uA") {
    class_a_current_uA = parse_number<double>(key, value);
  } else if (key == "fragment_rx_current_uA") {
    fragment_rx_current_uA = parse_number<double>(key, value);
  } else if (key == "fragment_rx_time_ms") {
    fragment_rx_time_ms = parse_number<double>(key, value);
  } else if (key == "redundancy_fraction") {
    redundancy_fraction = parse_number<double>(key, value);
  } else if (key == "supply_voltage_v") {
    supply_voltage_v = parse_number<double>(key, value);
  } else if (key == "spreading_factor") {
    spreading_factor = parse_number<int>(key, value);
  } else if (key == "reconstruction_energy_uAh") {
    reconstruction_energy_uAh = parse_number<double>(key, value);
  } else {
    throw Error(Errc::config, "unknown profile key '" + std::string(key) + "'");
  }
}

LinkProfile parse_profile(std::string_view text, LinkProfile base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::config, "line " + std::to_string(line_no) + ": expected key = value");
    }
    base.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  base.validate();
  return base;
}

LinkProfile load_profile(const std::filesystem::path& path, LinkProfile base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open profile " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_profile(text.str(), base);
}

std::uint64_t fragment_count(std::uint64_t image_bytes, const LinkProfile& profile) {
  const std::uint64_t payload = profile.payload_bytes_per_fragment;
  if (image_bytes == 0) return 0;
  if (profile.redundancy_fraction == 0) return (image_bytes + payload - 1) / payload;
  const long double q = static_cast<long double>(image_bytes) * (1.0L + profile.redundancy_fraction) /
                       static_cast<long double>(payload);
  // 0.1 is not exact in binary; a quotient within rounding noise of an
  // integer is that integer.
  const long double nearest = std::nearbyint(q);
  if (std::fabs(q - nearest) <= 1e-9L * std::max(1.0L, q)) return static_cast<std::uint64_t>(nearest);
  return static_cast<std::uint64_t>(std::ceil(q));
}

UpdateEstimate estimate_fragments(std::uint64_t fragments, const LinkProfile& profile) {
  UpdateEstimate e;
  e.fragments = fragments;
  e.duration_s = static_cast<double>(fragments) * profile.downlink_interval_s;
  const double rx_s = static_cast<double>(fragments) * profile.fragment_rx_time_ms / 1000.0;
  const double charge_uAs = profile.class_c_current_uA * (e.duration_s - rx_s) + profile.fragment_rx_current_uA * rx_s;
  e.energy_mAh = charge_uAs / (1000.0 * 3600.0);
  return e;
}

UpdateEstimate estimate_update(std::uint64_t image_bytes, const LinkProfile& profile) {
  return estimate_fragments(fragment_count(image_bytes, profile), profile);
}

Savings compare_estimates(const UpdateEstimate& full, const UpdateEstimate& incremental, const LinkProfile& profile) {
  Savings s;
  s.full = full;
  s.incremental = incremental;
  if (incremental.duration_s > 0) {
    s.time_ratio = full.duration_s / incremental.duration_s;
  } else {
    s.time_ratio = full.duration_s > 0 ? std::numeric_limits<double>::infinity() : 1.0;
  }
  s.energy_saving_mAh = full.energy_mAh - incremental.energy_mAh;
  s.reconstruction_mAh = incremental.fragments > 0 ? profile.reconstruction_energy_uAh / 1000.0 : 0.0;
  return s;
}

Savings compare_strategies(std::uint64_t full_image_bytes, std::uint64_t patch_bytes, const LinkProfile& profile) {
  return compare_estimates(estimate_update(full_image_bytes, profile), estimate_update(patch_bytes, profile), profile);
}

const char* scenario_name(Scenario scenario) noexcept {
  switch (scenario) {
    case Scenario::NU:
      return "NU";
    case Scenario::MN:
      return "MN";
    case Scenario::MJ:
      return "MJ";
  }
  return "?";
}

Scenario classify_scenario(std::uint64_t patch_bytes, std::uint64_t image_bytes) {
  if (image_bytes == 0) throw Error(Errc::invalid_input, "cannot classify against an empty image");
  // Exact: patch/image < 1/200 and patch/image > 1/5, in integers.
  if (patch_bytes <= (image_bytes - 1) / 200) return Scenario::NU;
  if (patch_bytes > image_bytes / 5) return Scenario::MJ;
  return Scenario::MN;
}

}  // namespace bpatch
