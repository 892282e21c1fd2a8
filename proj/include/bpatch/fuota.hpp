#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace bpatch {

// LoRaWAN link and energy parameters for one FUOTA session. Defaults model
// an SF9 EU868 Class C multicast session: 115-byte downlinks carrying 112
// fragment bytes, one downlink every 7 s.
struct LinkProfile {
  std::uint32_t payload_bytes_per_fragment = 112;
  double downlink_interval_s = 7.0;
  double class_c_current_uA = 6459.8;
  double class_a_current_uA = 1.75;
  double fragment_rx_current_uA = 6060.58;
  double fragment_rx_time_ms = 18.8;
  double redundancy_fraction = 0.0;
  double supply_voltage_v = 3.6;
  int spreading_factor = 9;
  // Device-side patch application, added to incremental updates only.
  double reconstruction_energy_uAh = 16.6;

  // Throws Errc::config on a non-positive current, time or interval, a zero
  // payload, or negative redundancy.
  void validate() const;

  // Sets one field by its name above. Throws Errc::config on an unknown key
  // or unparsable value.
  void set(std::string_view key, std::string_view value);

  friend bool operator==(const LinkProfile&, const LinkProfile&) = default;
};

// Parses `key = value` lines (`#` starts a comment) over the defaults.
LinkProfile parse_profile(std::string_view text, LinkProfile base = {});
LinkProfile load_profile(const std::filesystem::path& path, LinkProfile base = {});

struct UpdateEstimate {
  std::uint64_t fragments = 0;
  double duration_s = 0;
  double energy_mAh = 0;

  double duration_min() const noexcept { return duration_s / 60.0; }
};

std::uint64_t fragment_count(std::uint64_t image_bytes, const LinkProfile& profile);

// Each downlink period is spent listening in Class C except for the
// fragment reception itself.
UpdateEstimate estimate_fragments(std::uint64_t fragments, const LinkProfile& profile);
UpdateEstimate estimate_update(std::uint64_t image_bytes, const LinkProfile& profile);

struct Savings {
  UpdateEstimate full;
  UpdateEstimate incremental;
  // full / incremental duration; infinite when only the full update costs time.
  double time_ratio = 1.0;
  // Transmission energy saved.
  double energy_saving_mAh = 0;
  // Device-side reconstruction cost of the incremental update.
  double reconstruction_mAh = 0;

  double net_saving_mAh() const noexcept { return energy_saving_mAh - reconstruction_mAh; }
};

Savings compare_estimates(const UpdateEstimate& full, const UpdateEstimate& incremental, const LinkProfile& profile);
Savings compare_strategies(std::uint64_t full_image_bytes, std::uint64_t patch_bytes, const LinkProfile& profile);

enum class Scenario { NU, MN, MJ };

const char* scenario_name(Scenario scenario) noexcept;

// NU below 0.5 % of the image, MJ above 20 %, MN otherwise (both boundaries
// inclusive). Throws Errc::invalid_input for an empty image.
Scenario classify_scenario(std::uint64_t patch_bytes, std::uint64_t image_bytes);

}  // namespace bpatch
