#pragma once

#include <map>
#include <string>

#include "fdbeam/evaluate.hpp"

namespace fdbeam {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Layered key/value configuration: defaults, then an INI-style file
/// ([section] headers, key = value lines, '#' comments), then environment
/// variables (PREFIX_SECTION_KEY), then explicit flag overrides. Errors
/// carry the offending file line or key.
class Config {
 public:
  Config();

  void load_file(const std::string& filename);
  void apply_environment(const std::string& prefix = "FDBEAM_");
  void set(const std::string& key, const std::string& value, const std::string& origin = "flag");

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  std::uint64_t get_uint64(const std::string& key) const;

  ScenarioConfig to_scenario() const;

  struct SweepSpec {
    std::vector<double> lna_grid_dbm{-20.0, -10.0, 0.0};
    std::vector<int> adc_bits_grid{8, 10, 12, 14};
    std::vector<double> snr_db{10.0};
    int trials = 30;
  };
  SweepSpec to_sweep() const;

  /// Resolved snapshot for the run manifest.
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, std::string> origins_;

  [[noreturn]] void fail(const std::string& key, const std::string& what) const;
};

/// "lo:step:hi" inclusive ranges or comma-separated lists.
std::vector<double> parse_grid(const std::string& text);

/// "c3", "c4" or "c4-pruned" -> condition tier + pruned-builder flag.
std::pair<ConditionVariant, bool> parse_variant(const std::string& text);

}  // namespace fdbeam
