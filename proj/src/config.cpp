#include "fdbeam/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>

namespace fdbeam {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    const size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(trim(s.substr(start)));
      break;
    }
    parts.push_back(trim(s.substr(start, pos - start)));
    start = pos + 1;
  }
  return parts;
}

const std::map<std::string, std::string> kDefaults = {
    {"arrays.n_horizontal", "16"},
    {"arrays.n_vertical", "4"},
    {"arrays.spacing_wavelengths", "0.5"},
    {"arrays.carrier_ghz", "28.0"},
    {"scenario.l_t", "2"},
    {"scenario.l_r", "2"},
    {"scenario.n_s", "2"},
    {"scenario.num_subcarriers", "128"},
    {"scenario.num_taps", "16"},
    {"scenario.sample_interval_ns", "2.5"},
    {"scenario.num_rays", "15"},
    {"scenario.p_tx_dbm", "40.0"},
    {"scenario.g_sq_si_db", "-80.0"},
    {"scenario.g_sq_desired_db", "-100.0"},
    {"scenario.kappa", "10.0"},
    {"scenario.separation_m", "0.1"},
    {"scenario.snr_db", "-10:5:20"},
    {"scenario.trials", "200"},
    {"scenario.seed", "1"},
    {"scenario.variant", "c4"},
    {"scenario.link", "tx_only"},
    {"thresholds.p_lna_max_dbm", "-10.0"},
    {"thresholds.adc_bits", "12"},
    {"thresholds.noise_floor_dbm", "-90.0"},
    {"thresholds.papr_margin_db", "10.0"},
    {"sweep.lna_grid_dbm", "-20,-10,0"},
    {"sweep.adc_bits_grid", "8,10,12,14"},
    {"sweep.snr_db", "10"},
    {"sweep.trials", "30"},
};

}  // namespace

Config::Config() {
  for (const auto& [key, value] : kDefaults) {
    values_[key] = value;
    origins_[key] = "default";
  }
}

void Config::load_file(const std::string& filename) {
  std::ifstream in(filename);
  if (!in) throw ConfigError("cannot open config file: " + filename);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line.substr(0, line.find('#')));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']')
        throw ConfigError(filename + ":" + std::to_string(line_no) + ": unterminated section header");
      section = trim(text.substr(1, text.size() - 2));
      if (section.empty())
        throw ConfigError(filename + ":" + std::to_string(line_no) + ": empty section name");
      continue;
    }
    const size_t eq = text.find('=');
    if (eq == std::string::npos)
      throw ConfigError(filename + ":" + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty())
      throw ConfigError(filename + ":" + std::to_string(line_no) + ": empty key");
    if (section.empty())
      throw ConfigError(filename + ":" + std::to_string(line_no) + ": key outside any section");
    const std::string full = section + "." + key;
    if (!kDefaults.count(full) && full != "thresholds.p_adc_max_dbm")
      throw ConfigError(filename + ":" + std::to_string(line_no) + ": unknown key '" + full + "'");
    values_[full] = value;
    origins_[full] = filename + ":" + std::to_string(line_no);
  }
}

void Config::apply_environment(const std::string& prefix) {
  auto candidates = kDefaults;
  candidates.emplace("thresholds.p_adc_max_dbm", "");
  for (const auto& [key, unused] : candidates) {
    (void)unused;
    std::string env_name = prefix;
    for (char c : key) env_name += (c == '.') ? '_' : static_cast<char>(std::toupper(c));
    if (const char* value = std::getenv(env_name.c_str())) {
      values_[key] = value;
      origins_[key] = "env:" + env_name;
    }
  }
}

void Config::set(const std::string& key, const std::string& value, const std::string& origin) {
  values_[key] = value;
  origins_[key] = origin;
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

void Config::fail(const std::string& key, const std::string& what) const {
  const auto origin = origins_.find(key);
  const std::string where = origin == origins_.end() ? "unset" : origin->second;
  throw ConfigError("config field '" + key + "' (" + where + "): " + what);
}

std::string Config::get_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) fail(key, "missing");
  return it->second;
}

double Config::get_double(const std::string& key) const {
  const std::string text = get_string(key);
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0') fail(key, "not a number: '" + text + "'");
  return value;
}

int Config::get_int(const std::string& key) const {
  const double value = get_double(key);
  if (value != std::floor(value) || std::abs(value) > 2e9)
    fail(key, "not an integer: '" + get_string(key) + "'");
  return static_cast<int>(value);
}

std::uint64_t Config::get_uint64(const std::string& key) const {
  const std::string text = get_string(key);
  char* end = nullptr;
  const unsigned long long value = std::strtoull(text.c_str(), &end, 10);
  if (end == text.c_str() || *end != '\0') fail(key, "not an unsigned integer: '" + text + "'");
  return value;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw ConfigError("range must be 'lo:step:hi': '" + text + "'");
    const double lo = std::stod(parts[0]);
    const double step = std::stod(parts[1]);
    const double hi = std::stod(parts[2]);
    if (!(step > 0.0)) throw ConfigError("range step must be > 0: '" + text + "'");
    for (double v = lo; v <= hi + 1e-9 * std::max(1.0, std::abs(hi)); v += step) grid.push_back(v);
  } else {
    for (const std::string& part : split(text, ',')) {
      if (part.empty()) throw ConfigError("empty grid entry in '" + text + "'");
      grid.push_back(std::stod(part));
    }
  }
  if (grid.empty()) throw ConfigError("empty grid: '" + text + "'");
  return grid;
}

std::pair<ConditionVariant, bool> parse_variant(const std::string& text) {
  if (text == "c3") return {ConditionVariant::kC3SvdRfOnly, false};
  if (text == "c4") return {ConditionVariant::kC4ColNorm, false};
  if (text == "c4-pruned") return {ConditionVariant::kC4ColNorm, true};
  throw ConfigError("variant must be c3, c4 or c4-pruned: '" + text + "'");
}

ScenarioConfig Config::to_scenario() const {
  ScenarioConfig cfg;
  cfg.geometry.n_horizontal = get_int("arrays.n_horizontal");
  cfg.geometry.n_vertical = get_int("arrays.n_vertical");
  cfg.geometry.spacing_wavelengths = get_double("arrays.spacing_wavelengths");
  const double carrier_ghz = get_double("arrays.carrier_ghz");
  if (!(carrier_ghz > 0.0)) fail("arrays.carrier_ghz", "must be > 0");
  cfg.carrier_wavelength_m = 299792458.0 / (carrier_ghz * 1e9);

  cfg.l_t = get_int("scenario.l_t");
  cfg.l_r = get_int("scenario.l_r");
  cfg.n_s = get_int("scenario.n_s");
  cfg.num_subcarriers = get_int("scenario.num_subcarriers");
  cfg.num_taps = get_int("scenario.num_taps");
  cfg.sample_interval_s = get_double("scenario.sample_interval_ns") * 1e-9;
  cfg.num_rays = get_int("scenario.num_rays");
  cfg.p_tx_dbm = get_double("scenario.p_tx_dbm");
  cfg.g_sq_si_db = get_double("scenario.g_sq_si_db");
  cfg.g_sq_desired_db = get_double("scenario.g_sq_desired_db");
  cfg.kappa = get_double("scenario.kappa");
  cfg.separation_m = get_double("scenario.separation_m");
  try {
    cfg.snr_grid_db = parse_grid(get_string("scenario.snr_db"));
  } catch (const ConfigError& e) {
    fail("scenario.snr_db", e.what());
  }
  cfg.trials = get_int("scenario.trials");
  cfg.seed = get_uint64("scenario.seed");
  try {
    cfg.variant = parse_variant(get_string("scenario.variant")).first;
  } catch (const ConfigError& e) {
    fail("scenario.variant", e.what());
  }
  const std::string link = get_string("scenario.link");
  if (link == "tx_only")
    cfg.link = LinkMode::kTxOnly;
  else if (link == "tx_then_rx")
    cfg.link = LinkMode::kTxThenRx;
  else
    fail("scenario.link", "must be tx_only or tx_then_rx");

  if (has("thresholds.p_adc_max_dbm")) {
    cfg.thresholds.p_lna_max_dbm = get_double("thresholds.p_lna_max_dbm");
    cfg.thresholds.p_adc_max_dbm = get_double("thresholds.p_adc_max_dbm");
    cfg.thresholds.adc_bits.reset();
    cfg.thresholds.noise_floor_dbm = get_double("thresholds.noise_floor_dbm");
    cfg.thresholds.papr_margin_db = get_double("thresholds.papr_margin_db");
  } else {
    cfg.thresholds = SaturationThresholds::from_adc_bits(
        get_double("thresholds.p_lna_max_dbm"), get_int("thresholds.adc_bits"),
        get_double("thresholds.noise_floor_dbm"), get_double("thresholds.papr_margin_db"));
  }

  try {
    cfg.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid scenario configuration: ") + e.what());
  }
  return cfg;
}

Config::SweepSpec Config::to_sweep() const {
  SweepSpec spec;
  try {
    spec.lna_grid_dbm = parse_grid(get_string("sweep.lna_grid_dbm"));
  } catch (const ConfigError& e) {
    fail("sweep.lna_grid_dbm", e.what());
  }
  std::vector<double> bits;
  try {
    bits = parse_grid(get_string("sweep.adc_bits_grid"));
  } catch (const ConfigError& e) {
    fail("sweep.adc_bits_grid", e.what());
  }
  spec.adc_bits_grid.clear();
  for (double b : bits) {
    if (b != std::floor(b) || b < 1) fail("sweep.adc_bits_grid", "entries must be positive integers");
    spec.adc_bits_grid.push_back(static_cast<int>(b));
  }
  try {
    spec.snr_db = parse_grid(get_string("sweep.snr_db"));
  } catch (const ConfigError& e) {
    fail("sweep.snr_db", e.what());
  }
  spec.trials = get_int("sweep.trials");
  if (spec.trials < 1) fail("sweep.trials", "must be >= 1");
  return spec;
}

}  // namespace fdbeam
