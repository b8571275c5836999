#include "fdbeam/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

namespace fdbeam {

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // trim surrounding whitespace
    const auto begin = field.find_first_not_of(" \t\r");
    const auto end = field.find_last_not_of(" \t\r");
    fields.push_back(begin == std::string::npos ? "" : field.substr(begin, end - begin + 1));
  }
  return fields;
}

[[noreturn]] void parse_error(const std::string& filename, int line_no, const std::string& what) {
  throw std::runtime_error(filename + ":" + std::to_string(line_no) + ": " + what);
}

double parse_field(const std::string& filename, int line_no, const std::string& field,
                   const std::string& name) {
  try {
    size_t consumed = 0;
    const double value = std::stod(field, &consumed);
    if (consumed != field.size()) throw std::invalid_argument("trailing characters");
    return value;
  } catch (const std::exception&) {
    parse_error(filename, line_no, "invalid value for '" + name + "': '" + field + "'");
  }
}

const char* const kPathHeader[] = {"gain_re",    "gain_im",    "delay_s",   "aoa_el_rad",
                                   "aoa_az_rad", "aod_el_rad", "aod_az_rad"};

}  // namespace

std::vector<Path> load_path_csv(const std::string& filename) {
  std::ifstream in(filename);
  if (!in) throw std::runtime_error("cannot open path file: " + filename);

  std::vector<Path> paths;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> fields = split_csv_row(line);
    if (!header_seen) {
      if (fields.size() != 7)
        parse_error(filename, line_no, "expected 7 header columns, got " +
                                           std::to_string(fields.size()));
      for (size_t i = 0; i < 7; ++i)
        if (fields[i] != kPathHeader[i])
          parse_error(filename, line_no,
                      "header column " + std::to_string(i + 1) + " must be '" +
                          kPathHeader[i] + "', got '" + fields[i] + "'");
      header_seen = true;
      continue;
    }
    if (fields.size() != 7)
      parse_error(filename, line_no, "expected 7 fields, got " + std::to_string(fields.size()));
    Path p;
    p.gain = Complex(parse_field(filename, line_no, fields[0], kPathHeader[0]),
                     parse_field(filename, line_no, fields[1], kPathHeader[1]));
    p.delay_s = parse_field(filename, line_no, fields[2], kPathHeader[2]);
    p.aoa_el = parse_field(filename, line_no, fields[3], kPathHeader[3]);
    p.aoa_az = parse_field(filename, line_no, fields[4], kPathHeader[4]);
    p.aod_el = parse_field(filename, line_no, fields[5], kPathHeader[5]);
    p.aod_az = parse_field(filename, line_no, fields[6], kPathHeader[6]);
    if (p.delay_s < 0.0) parse_error(filename, line_no, "delay_s must be >= 0");
    for (double angle : {p.aoa_el, p.aoa_az, p.aod_el, p.aod_az})
      if (!std::isfinite(angle)) parse_error(filename, line_no, "non-finite angle");
    paths.push_back(p);
  }
  if (!header_seen) throw std::runtime_error(filename + ": missing header row");
  return paths;
}

void write_path_csv(const std::string& filename, const std::vector<Path>& paths) {
  std::ofstream out(filename);
  if (!out) throw std::runtime_error("cannot write path file: " + filename);
  out << "gain_re,gain_im,delay_s,aoa_el_rad,aoa_az_rad,aod_el_rad,aod_az_rad\n";
  for (const Path& p : paths) {
    out << format_double(p.gain.real()) << ',' << format_double(p.gain.imag()) << ','
        << format_double(p.delay_s) << ',' << format_double(p.aoa_el) << ','
        << format_double(p.aoa_az) << ',' << format_double(p.aod_el) << ','
        << format_double(p.aod_az) << '\n';
  }
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  // prefer the shortest representation that round-trips
  for (int precision = 1; precision < 17; ++precision) {
    char candidate[40];
    std::snprintf(candidate, sizeof(candidate), "%.*g", precision, value);
    if (std::strtod(candidate, nullptr) == value) return candidate;
  }
  return buf;
}

namespace {

void write_result_rows(std::ofstream& out, const EvalResult& r, const std::string& name,
                       double se_scale) {
  for (size_t s = 0; s < r.snr_db.size(); ++s) {
    out << name << ',' << format_double(r.snr_db[s]) << ','
        << format_double(se_scale * r.se_tx[s]) << ',' << format_double(se_scale * r.se_rx[s])
        << ',' << format_double(se_scale * r.se_sum[s]) << ','
        << format_double(r.allowlist_size_mean) << ',' << format_double(r.meas_tx_mean) << ','
        << format_double(r.meas_total_mean) << ',' << format_double(r.svd_mean) << ','
        << format_double(r.colnorm_mean) << ',' << format_double(r.combo_tests_mean) << ','
        << format_double(r.beta_mean) << ',' << format_double(r.saturated_frac) << '\n';
  }
}

}  // namespace

void write_results_csv(const std::string& filename, const std::vector<EvalResult>& results,
                       bool include_hd_reference) {
  std::ofstream out(filename);
  if (!out) throw std::runtime_error("cannot write results file: " + filename);
  out << "method,snr_db,se_tx,se_rx,se_sum,allowlist_size_mean,meas_tx,meas_total,"
         "svd_count,colnorm_count,combo_tests,beta_mean,saturated_frac\n";
  for (const EvalResult& r : results) write_result_rows(out, r, method_name(r.method), 1.0);
  if (include_hd_reference) {
    for (const EvalResult& r : results) {
      if (r.method == Method::kIdealFd) {
        write_result_rows(out, r, "hd_reference", 0.5);
        break;
      }
    }
  }
}

void write_sweep_csv(const std::string& filename, const std::vector<RxSweepCell>& cells) {
  std::ofstream out(filename);
  if (!out) throw std::runtime_error("cannot write sweep file: " + filename);
  out << "p_lna_dbm,adc_bits,method,snr_db,se_tx,se_rx,se_sum,allowlist_size_mean,"
         "meas_tx,meas_total,svd_count,colnorm_count,combo_tests,beta_mean,saturated_frac\n";
  for (const RxSweepCell& cell : cells) {
    const EvalResult& r = cell.result;
    for (size_t s = 0; s < r.snr_db.size(); ++s) {
      out << format_double(cell.p_lna_dbm) << ',' << cell.adc_bits << ','
          << method_name(r.method) << ',' << format_double(r.snr_db[s]) << ','
          << format_double(r.se_tx[s]) << ',' << format_double(r.se_rx[s]) << ','
          << format_double(r.se_sum[s]) << ',' << format_double(r.allowlist_size_mean) << ','
          << format_double(r.meas_tx_mean) << ',' << format_double(r.meas_total_mean) << ','
          << format_double(r.svd_mean) << ',' << format_double(r.colnorm_mean) << ','
          << format_double(r.combo_tests_mean) << ',' << format_double(r.beta_mean) << ','
          << format_double(r.saturated_frac) << '\n';
    }
  }
}

void write_allowlist_dump(const std::string& filename, const FeasibleSet& fs,
                          const Allowlist& allowlist, const EtaConstants& eta,
                          const Codebook& codebook) {
  std::ofstream out(filename);
  if (!out) throw std::runtime_error("cannot write allowlist file: " + filename);
  out << "# variant="
      << (fs.variant == ConditionVariant::kC4ColNorm ? "c4_colnorm" : "c3_svd_rf_only") << '\n';
  out << "# link=" << (fs.link == LinkMode::kTxOnly ? "tx_only" : "tx_then_rx") << '\n';
  out << "# eta_lna=" << format_double(eta.eta_lna) << '\n';
  out << "# eta_adc=" << format_double(eta.eta_adc) << '\n';
  char hash[24];
  std::snprintf(hash, sizeof(hash), "0x%016llx",
                static_cast<unsigned long long>(codebook_hash(codebook)));
  out << "# codebook_hash=" << hash << '\n';
  out << "# allowlist=";
  for (size_t i = 0; i < allowlist.beam_ids.size(); ++i) {
    if (i) out << ',';
    out << allowlist.beam_ids[i];
  }
  out << '\n';
  for (const BeamCombo& combo : fs.combos) {
    for (size_t i = 0; i < combo.size(); ++i) {
      if (i) out << ',';
      out << combo[i];
    }
    out << '\n';
  }
}

void write_array_factor_csv(const std::string& filename, const Codebook& codebook,
                            const ArrayGeometry& geometry, double azimuth_rad) {
  std::ofstream out(filename);
  if (!out) throw std::runtime_error("cannot write array-factor file: " + filename);
  std::vector<std::pair<double, double>> grid;
  for (int deg = -90; deg <= 90; ++deg)
    grid.emplace_back(deg * std::numbers::pi / 180.0, azimuth_rad);

  out << "beam_id,elevation_rad,azimuth_rad,gain_linear\n";
  for (int id : codebook.beam_ids) {
    const ArrayFactorCurve curve = array_factor(codebook.beam(id), geometry, grid);
    for (size_t g = 0; g < grid.size(); ++g) {
      out << id << ',' << format_double(grid[g].first) << ',' << format_double(grid[g].second)
          << ',' << format_double(curve.gain[g]) << '\n';
    }
  }
}

}  // namespace fdbeam
