#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "fdbeam/beamform.hpp"
#include "fdbeam/types.hpp"

namespace fdbeam {

enum class Method {
  kProposedC3,
  kProposedC4,
  kProposedC4Pruned,
  kPowerReduction,
  kIdealFd,
};

std::string method_name(Method method);
Method method_from_name(const std::string& name);

/// Everything a scenario run needs. Defaults follow the standard evaluation
/// setup: 16x4 faces, two chains, two streams, 128 subcarriers, 40 dBm
/// transmit power, -10 dBm LNA cap, 12-bit ADC over a -90 dBm noise floor
/// with a 10 dB peak-power margin, 0.1 m face separation.
struct ScenarioConfig {
  ArrayGeometry geometry{16, 4, 0.5};
  double carrier_wavelength_m = 0.0107068735;  // 28 GHz carrier

  int l_t = 2;
  int l_r = 2;
  int n_s = 2;
  int num_subcarriers = 128;

  int num_taps = 16;
  double sample_interval_s = 2.5e-9;
  int num_rays = 15;

  double p_tx_dbm = 40.0;
  double g_sq_si_db = -80.0;        // large-scale gain of the self loop
  double g_sq_desired_db = -100.0;  // large-scale gain of the desired links
  double kappa = 10.0;
  double separation_m = 0.1;

  std::vector<double> snr_grid_db{-10, -5, 0, 5, 10, 15, 20};
  SaturationThresholds thresholds = SaturationThresholds::from_adc_bits(-10.0, 12, -90.0, 10.0);
  ConditionVariant variant = ConditionVariant::kC4ColNorm;
  LinkMode link = LinkMode::kTxOnly;

  std::uint64_t seed = 1;
  int trials = 200;

  void validate() const;
};

/// Where the self-interference far-field paths come from: drawn per trial or
/// fixed from a loaded path list.
struct SiSource {
  bool stochastic = true;
  std::vector<Path> paths;

  static SiSource make_stochastic() { return SiSource{}; }
  static SiSource from_paths(std::vector<Path> p) { return SiSource{false, std::move(p)}; }
};

struct TrialRecord {
  std::vector<int> allowlist;
  bool infeasible = false;  // empty feasible set; power-reduced fallback applied
  bool saturated = false;
  double beta = 1.0;
  OpCounter ops;
  MeasurementCount measurements;
  BeamCombo tx_combo;
  BeamCombo rx_combo;
};

struct EvalResult {
  Method method = Method::kIdealFd;
  std::vector<double> snr_db;
  std::vector<double> se_tx;   // desired-link rate toward the peer, per snr point
  std::vector<double> se_rx;   // reverse-link rate at the duplex node
  std::vector<double> se_sum;  // se_tx + se_rx
  double allowlist_size_mean = 0.0;
  double meas_tx_mean = 0.0;
  double meas_total_mean = 0.0;
  double svd_mean = 0.0;
  double colnorm_mean = 0.0;
  double combo_tests_mean = 0.0;
  double beta_mean = 1.0;
  double saturated_frac = 0.0;
  double infeasible_frac = 0.0;
  std::vector<TrialRecord> trial_records;
};

/// Mean log-det rate of the digitally beamformed link, in bits/s/Hz:
/// (1/U) sum_u log2 det(I + (snr/n_s) (I + R[u])^-1 M[u] M[u]*) with
/// M[u] = Wbb[u]* Heff[u] Fbb[u] and R the noise-normalized residual
/// interference covariance (zero when absent).
double spectral_efficiency(const FreqChannel& eff, const std::vector<CMatrix>& f_bb_per_u,
                           const std::vector<CMatrix>& w_bb_per_u, double snr_linear, int n_s,
                           const ResidualSi* residual = nullptr);

/// Seeded Monte-Carlo run: per trial, draw the desired and self-interference
/// channels, construct the method's feasible set, sweep, select, beamform,
/// cancel and evaluate the rate at every grid point. Trials use split seeds
/// and are reduced in trial order, so results are a pure function of
/// (config, seed, method).
EvalResult run_scenario(const ScenarioConfig& cfg, const SiSource& si_source, Method method);

/// Same, for several methods over shared per-trial channels (each method's
/// result is bit-identical to its single-method run).
std::vector<EvalResult> run_scenario_methods(const ScenarioConfig& cfg, const SiSource& si_source,
                                             const std::vector<Method>& methods);

struct RxSweepCell {
  double p_lna_dbm = 0.0;
  int adc_bits = 0;
  EvalResult result;
};

/// Cross-product sweep over receiver component configurations at the
/// config's SNR grid; trials are paired across cells (same channels).
std::vector<RxSweepCell> sweep_rx_components(const ScenarioConfig& cfg, const SiSource& si_source,
                                             const std::vector<double>& lna_grid_dbm,
                                             const std::vector<int>& adc_bits_grid,
                                             const std::vector<Method>& methods);

/// Deterministic per-trial generator stream.
std::mt19937_64 make_trial_rng(std::uint64_t seed, int trial);

/// Clustered multipath for a desired link: num_rays paths with unit total
/// profile power scaled to E||H||_F^2 = N_t N_r, exponentially decaying mean
/// powers, solid-angle-uniform directions over the forward hemisphere and
/// delays inside the tap window.
std::vector<Path> gen_desired_paths(std::mt19937_64& rng, const ScenarioConfig& cfg);

/// Far-field self-interference substitute: a dominant direct bounce plus
/// num_rays-1 decaying reflections, with at least 80% of the profile power
/// in the two strongest paths.
std::vector<Path> gen_si_farfield_paths(std::mt19937_64& rng, const ScenarioConfig& cfg);

/// Assemble the self-interference channel on the subcarrier grid from its
/// near-field coupling and far-field paths.
FreqChannel build_si_channel(const ScenarioConfig& cfg, const std::vector<Path>& farfield_paths);

}  // namespace fdbeam
