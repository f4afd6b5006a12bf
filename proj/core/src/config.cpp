#include "iorisk/config.hpp"

#include <fstream>
#include <stdexcept>

#include "iorisk/csv.hpp"

namespace iorisk {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

double to_double(std::string_view key, std::string_view value) {
  double v = 0;
  if (!csv::parse_double(value, v))
    throw std::invalid_argument("config '" + std::string(key) + "': not a number: '" +
                                std::string(value) + "'");
  return v;
}

std::int64_t to_int(std::string_view key, std::string_view value) {
  std::int64_t v = 0;
  if (!csv::parse_int(value, v))
    throw std::invalid_argument("config '" + std::string(key) + "': not an integer: '" +
                                std::string(value) + "'");
  return v;
}

bool to_bool(std::string_view key, std::string_view value) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  throw std::invalid_argument("config '" + std::string(key) + "': not a boolean: '" +
                              std::string(value) + "'");
}

}  // namespace

void Config::set(std::string_view raw_key, std::string_view raw_value) {
  std::string key(trim(raw_key));
  for (char& c : key)
    if (c == '_') c = '-';
  const std::string_view value = trim(raw_value);

  if (key == "bin-width") bin_width_s = to_int(key, value);
  else if (key == "alpha") alpha = to_double(key, value);
  else if (key == "beta") beta = to_double(key, value);
  else if (key == "md-threshold") md_small_avg_threshold = to_double(key, value);
  else if (key == "slowdown-factor") slowdown_factor = to_double(key, value);
  else if (key == "min-group") {
    const auto v = to_int(key, value);
    if (v < 0) throw std::invalid_argument("config 'min-group' must be positive");
    min_group = static_cast<std::size_t>(v);
  } else if (key == "scatter-min-risk") scatter_min_risk = to_double(key, value);
  else if (key == "cores-per-node") cores_per_node = static_cast<int>(to_int(key, value));
  else if (key == "baseline-days") {
    if (value.empty()) baseline_days.reset();
    else baseline_days = static_cast<int>(to_int(key, value));
  } else if (key == "top-k") {
    const auto v = to_int(key, value);
    if (v < 0) throw std::invalid_argument("config 'top-k' must be non-negative");
    top_k = static_cast<std::size_t>(v);
  } else if (key == "pre-differenced") pre_differenced = to_bool(key, value);
  else if (key == "max-gap-bins") max_gap_bins = static_cast<int>(to_int(key, value));
  else if (key == "day-offset") day_offset_s = to_int(key, value);
  else if (key == "svg") svg = to_bool(key, value);
  else if (key == "quality-mean") quality_mean = to_bool(key, value);
  else if (key == "out") out = std::string(value);
  else if (key == "counters") counters = std::string(value);
  else if (key == "jobs") jobs = std::string(value);
  else if (key == "probe") probe = std::string(value);
  else throw std::invalid_argument("unknown config key '" + key + "'");
}

void Config::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
  if (bin_width_s <= 0) fail("bin-width must be positive");
  if (!(alpha > 0.0)) fail("alpha must be positive");
  if (!(beta > 0.0)) fail("beta must be positive");
  if (!(md_small_avg_threshold > 0.0)) fail("md-threshold must be positive");
  if (!(slowdown_factor > 1.0)) fail("slowdown-factor must exceed 1");
  if (min_group < 2) fail("min-group must be at least 2");
  if (!(scatter_min_risk > 0.0)) fail("scatter-min-risk must be positive");
  if (cores_per_node <= 0) fail("cores-per-node must be positive");
  if (baseline_days && *baseline_days <= 0) fail("baseline-days must be positive");
  if (max_gap_bins <= 0) fail("max-gap-bins must be positive");
}

void load_config_file(const std::filesystem::path& path, Config& config) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) +
                                  ": expected key=value");
    config.set(s.substr(0, eq), s.substr(eq + 1));
  }
}

}  // namespace iorisk
