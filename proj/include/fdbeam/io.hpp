#pragma once

#include <string>

#include "fdbeam/allowlist.hpp"
#include "fdbeam/codebook.hpp"
#include "fdbeam/evaluate.hpp"
#include "fdbeam/types.hpp"

namespace fdbeam {

/// Load a propagation path list from CSV. Expected header:
/// gain_re,gain_im,delay_s,aoa_el_rad,aoa_az_rad,aod_el_rad,aod_az_rad
/// followed by one path per row; '#'-prefixed lines and blank lines are
/// skipped. Parse errors report the offending line and field.
std::vector<Path> load_path_csv(const std::string& filename);

void write_path_csv(const std::string& filename, const std::vector<Path>& paths);

/// One row per (method, snr) cell of a scenario run.
void write_results_csv(const std::string& filename, const std::vector<EvalResult>& results,
                       bool include_hd_reference = true);

/// One row per (p_lna_dbm, adc_bits, method, snr) cell of a component sweep.
void write_sweep_csv(const std::string& filename, const std::vector<RxSweepCell>& cells);

/// Line-oriented feasible-set dump: '#' header lines carrying the condition
/// tier, the budgets, the codebook hash and the induced allowlist, then one
/// combination per line as comma-separated beam ids.
void write_allowlist_dump(const std::string& filename, const FeasibleSet& fs,
                          const Allowlist& allowlist, const EtaConstants& eta,
                          const Codebook& codebook);

/// Gain curves for every beam of a codebook over a 1-degree cut through
/// boresight (elevation swept at a fixed azimuth).
void write_array_factor_csv(const std::string& filename, const Codebook& codebook,
                            const ArrayGeometry& geometry, double azimuth_rad = 0.0);

/// Format a double the way every CSV writer here does (shortest round-trip
/// representation, stable across runs).
std::string format_double(double value);

}  // namespace fdbeam
