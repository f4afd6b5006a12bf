#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "iorisk/apportion.hpp"

namespace iorisk {

/// Run configuration. Defaults are the shipped analysis constants.
struct Config {
  Timestamp bin_width_s = 360;
  double alpha = 2.0;
  double beta = 0.25;
  double md_small_avg_threshold = 1.0;
  double slowdown_factor = 1.5;
  std::size_t min_group = 3;
  double scatter_min_risk = 25.0;
  int cores_per_node = 24;
  std::optional<int> baseline_days;
  std::size_t top_k = 5;
  bool pre_differenced = false;
  int max_gap_bins = 3;
  Timestamp day_offset_s = 0;
  bool svg = false;
  bool quality_mean = false;

  std::filesystem::path out = "iorisk-out";
  std::filesystem::path counters;
  std::filesystem::path jobs;
  std::filesystem::path probe;

  /// Applies one `key=value` setting. Keys match the long flag names
  /// (`bin-width`, `alpha`, ...); underscores are accepted for dashes.
  /// Throws std::invalid_argument on unknown keys or unparsable values.
  void set(std::string_view key, std::string_view value);

  /// Throws std::invalid_argument when a parameter is out of range.
  void validate() const;
};

/// Reads `key=value` lines; blank lines and `#` comments are ignored.
void load_config_file(const std::filesystem::path& path, Config& config);

/// Environment variable naming the config file.
inline constexpr const char* kConfigEnv = "IORISK_CONFIG";

}  // namespace iorisk
