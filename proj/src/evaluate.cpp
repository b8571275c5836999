#include "fdbeam/evaluate.hpp"

#include <algorithm>
#include <cmath>

#include "fdbeam/channel.hpp"

namespace fdbeam {

namespace {
constexpr double kSpeedOfLight = 299792458.0;
}

std::string method_name(Method method) {
  switch (method) {
    case Method::kProposedC3: return "proposed_c3";
    case Method::kProposedC4: return "proposed_c4";
    case Method::kProposedC4Pruned: return "proposed_c4_pruned";
    case Method::kPowerReduction: return "power_reduction";
    case Method::kIdealFd: return "ideal_fd";
  }
  throw std::invalid_argument("method_name: unknown method");
}

Method method_from_name(const std::string& name) {
  if (name == "proposed_c3") return Method::kProposedC3;
  if (name == "proposed_c4") return Method::kProposedC4;
  if (name == "proposed_c4_pruned") return Method::kProposedC4Pruned;
  if (name == "power_reduction") return Method::kPowerReduction;
  if (name == "ideal_fd") return Method::kIdealFd;
  throw std::invalid_argument("unknown method name: " + name);
}

void ScenarioConfig::validate() const {
  geometry.validate();
  if (!(carrier_wavelength_m > 0.0))
    throw std::invalid_argument("ScenarioConfig: carrier wavelength must be > 0");
  if (l_t < 1 || l_r < 1) throw std::invalid_argument("ScenarioConfig: chain counts must be >= 1");
  if (l_t > geometry.size() || l_r > geometry.size())
    throw std::invalid_argument("ScenarioConfig: more chains than beams");
  if (n_s < 1 || n_s > std::min(l_t, l_r))
    throw std::invalid_argument("ScenarioConfig: n_s must be in [1, min(l_t, l_r)]");
  if (num_subcarriers < 1) throw std::invalid_argument("ScenarioConfig: need subcarriers");
  if (num_taps < 1 || num_taps > num_subcarriers)
    throw std::invalid_argument("ScenarioConfig: num_taps must be in [1, num_subcarriers]");
  if (!(sample_interval_s > 0.0))
    throw std::invalid_argument("ScenarioConfig: sample interval must be > 0");
  if (num_rays < 1) throw std::invalid_argument("ScenarioConfig: num_rays must be >= 1");
  if (kappa < 0.0) throw std::invalid_argument("ScenarioConfig: kappa must be >= 0");
  if (!(separation_m > 0.0)) throw std::invalid_argument("ScenarioConfig: separation must be > 0");
  if (snr_grid_db.empty()) throw std::invalid_argument("ScenarioConfig: empty SNR grid");
  for (double s : snr_grid_db)
    if (!std::isfinite(s)) throw std::invalid_argument("ScenarioConfig: non-finite SNR point");
  if (trials < 1) throw std::invalid_argument("ScenarioConfig: trials must be >= 1");
}

std::mt19937_64 make_trial_rng(std::uint64_t seed, int trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), 0x9e3779b9u};
  return std::mt19937_64(seq);
}

namespace {

double uniform01(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/// Solid-angle-uniform direction over the forward hemisphere (elevation
/// from boresight in [0, pi/2], azimuth in [-pi, pi)).
std::pair<double, double> hemisphere_direction(std::mt19937_64& rng) {
  const double el = std::acos(uniform01(rng));
  const double az = (2.0 * uniform01(rng) - 1.0) * std::numbers::pi;
  return {el, az};
}

}  // namespace

std::vector<Path> gen_desired_paths(std::mt19937_64& rng, const ScenarioConfig& cfg) {
  const int n = cfg.num_rays;
  std::vector<double> profile(static_cast<size_t>(n));
  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    const double jitter = std::pow(10.0, 0.2 * (uniform01(rng) - 0.5));
    profile[static_cast<size_t>(k)] = std::exp(-k / 3.0) * jitter;
    total += profile[static_cast<size_t>(k)];
  }
  const double scale = static_cast<double>(cfg.geometry.size()) * cfg.geometry.size();
  const double delay_window = (cfg.num_taps - 1) * cfg.sample_interval_s;

  std::vector<Path> paths;
  paths.reserve(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    Path p;
    p.delay_s = (k == 0) ? 0.0 : uniform01(rng) * delay_window;
    std::tie(p.aoa_el, p.aoa_az) = hemisphere_direction(rng);
    std::tie(p.aod_el, p.aod_az) = hemisphere_direction(rng);
    const double phase = 2.0 * std::numbers::pi * uniform01(rng);
    const double amp = std::sqrt(profile[static_cast<size_t>(k)] / total * scale);
    p.gain = amp * Complex(std::cos(phase), std::sin(phase));
    paths.push_back(p);
  }
  return paths;
}

std::vector<Path> gen_si_farfield_paths(std::mt19937_64& rng, const ScenarioConfig& cfg) {
  const int n = cfg.num_rays;
  // Direct-bounce fraction plus decaying reflections; the two strongest
  // paths always hold at least 80% of the profile.
  double p_los = 0.5 + 0.15 * uniform01(rng);
  std::vector<double> reflections(static_cast<size_t>(std::max(n - 1, 0)));
  double refl_total = 0.0;
  for (size_t k = 0; k < reflections.size(); ++k) {
    const double jitter = std::pow(10.0, 0.2 * (uniform01(rng) - 0.5));
    reflections[k] = std::exp(-static_cast<double>(k) / 2.0) * jitter;
    refl_total += reflections[k];
  }
  std::vector<double> profile(static_cast<size_t>(n));
  profile[0] = p_los;
  for (size_t k = 0; k < reflections.size(); ++k)
    profile[k + 1] = reflections[k] / refl_total * (1.0 - p_los);
  if (n >= 2 && profile[0] + profile[1] < 0.8) {
    // Grow the first reflection to the dominance floor and fold the
    // remainder proportionally into the tail.
    profile[1] = 0.8 - profile[0];
    const double remaining = 1.0 - profile[0] - profile[1];
    double orig_tail = 0.0;
    for (size_t k = 1; k < reflections.size(); ++k) orig_tail += reflections[k];
    for (size_t k = 2; k < profile.size(); ++k)
      profile[k] = orig_tail > 0.0 ? reflections[k - 1] / orig_tail * remaining : 0.0;
  }

  const double scale = static_cast<double>(cfg.geometry.size()) * cfg.geometry.size();
  const double t_min = std::min(2.0 * cfg.sample_interval_s, (cfg.num_taps - 1) * cfg.sample_interval_s);
  const double t_max = (cfg.num_taps - 1) * cfg.sample_interval_s;

  std::vector<Path> paths;
  paths.reserve(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    Path p;
    if (k == 0) {
      p.delay_s = cfg.separation_m / kSpeedOfLight;
      p.aod_el = 0.5 * std::numbers::pi;
      p.aod_az = -0.5 * std::numbers::pi;  // toward the receive face below
      p.aoa_el = 0.5 * std::numbers::pi;
      p.aoa_az = 0.5 * std::numbers::pi;  // arriving from the transmit face above
    } else {
      p.delay_s = t_min + uniform01(rng) * (t_max - t_min);
      std::tie(p.aoa_el, p.aoa_az) = hemisphere_direction(rng);
      std::tie(p.aod_el, p.aod_az) = hemisphere_direction(rng);
    }
    const double phase = 2.0 * std::numbers::pi * uniform01(rng);
    const double amp = std::sqrt(profile[static_cast<size_t>(k)] * scale);
    p.gain = amp * Complex(std::cos(phase), std::sin(phase));
    paths.push_back(p);
  }
  return paths;
}

FreqChannel build_si_channel(const ScenarioConfig& cfg, const std::vector<Path>& farfield_paths) {
  const FarfieldTaps ff = gen_farfield_taps(farfield_paths, cfg.geometry, cfg.geometry,
                                            cfg.sample_interval_s, cfg.num_taps);
  const CMatrix nf = gen_nearfield_si_normalized(cfg.geometry, cfg.geometry, cfg.separation_m,
                                                 cfg.carrier_wavelength_m);
  const TapChannel taps = combine_rician(nf, ff.taps, cfg.kappa);
  return taps_to_subcarriers(taps, cfg.num_subcarriers);
}

double spectral_efficiency(const FreqChannel& eff, const std::vector<CMatrix>& f_bb_per_u,
                           const std::vector<CMatrix>& w_bb_per_u, double snr_linear, int n_s,
                           const ResidualSi* residual) {
  const size_t u_count = eff.per_subcarrier.size();
  if (u_count == 0) throw std::invalid_argument("spectral_efficiency: empty channel");
  if (f_bb_per_u.size() != u_count || w_bb_per_u.size() != u_count)
    throw std::invalid_argument("spectral_efficiency: need one digital beamformer per subcarrier");
  if (!(snr_linear >= 0.0) || !std::isfinite(snr_linear))
    throw std::invalid_argument("spectral_efficiency: snr must be finite and >= 0");
  if (residual && residual->covariance.size() != u_count)
    throw std::invalid_argument("spectral_efficiency: residual covariance size mismatch");

  double se = 0.0;
  for (size_t u = 0; u < u_count; ++u) {
    const CMatrix m = w_bb_per_u[u].adjoint() * eff.per_subcarrier[u] * f_bb_per_u[u];
    if (!m.allFinite()) throw std::invalid_argument("spectral_efficiency: non-finite input");
    CMatrix gram(n_s, n_s);
    if (residual && residual->covariance[u].squaredNorm() > 0.0) {
      const CMatrix a = CMatrix::Identity(n_s, n_s) + residual->covariance[u];
      gram = m.adjoint() * a.llt().solve(m);
    } else {
      gram = m.adjoint() * m;
    }
    const CMatrix d = CMatrix::Identity(n_s, n_s) + (snr_linear / n_s) * gram;
    se += std::log2(std::max(d.determinant().real(), 1.0));
  }
  return se / static_cast<double>(u_count);
}

namespace {

/// Per-trial state shared by every method: the drawn channels, the
/// full-codebook sweep tables and the reverse-link (unconstrained)
/// selection.
struct TrialContext {
  FreqChannel h_ij, h_ki, h_ii;
  MeasurementTable table_ij;
  MeasurementTable table_ki;
  RfSelection rx_sel;
  CMatrix f_rf_k, w_rf_i;
  FreqChannel eff_ki;
  DigitalBeamformers bf_ki;
};

struct Shared {
  Codebook codebook;
  EtaConstants eta;
  FeasibleSet all_combos;
  double inr_over_snr = 0.0;  // self-loop to desired-link large-scale ratio
};

TrialContext make_trial_context(const ScenarioConfig& cfg, const SiSource& si_source,
                                const Shared& shared, int trial) {
  std::mt19937_64 rng = make_trial_rng(cfg.seed, trial);
  const std::vector<Path> paths_ij = gen_desired_paths(rng, cfg);
  const std::vector<Path> paths_ki = gen_desired_paths(rng, cfg);
  const std::vector<Path> paths_si =
      si_source.stochastic ? gen_si_farfield_paths(rng, cfg) : si_source.paths;

  TrialContext ctx;
  const auto desired = [&](const std::vector<Path>& paths) {
    const FarfieldTaps ff =
        gen_farfield_taps(paths, cfg.geometry, cfg.geometry, cfg.sample_interval_s, cfg.num_taps);
    return taps_to_subcarriers(ff.taps, cfg.num_subcarriers);
  };
  ctx.h_ij = desired(paths_ij);
  ctx.h_ki = desired(paths_ki);
  ctx.h_ii = build_si_channel(cfg, paths_si);

  ctx.table_ij = beam_sweep(shared.codebook, shared.codebook, ctx.h_ij);
  ctx.table_ki = beam_sweep(shared.codebook, shared.codebook, ctx.h_ki);

  const auto rx_sel = select_rf(shared.all_combos, ctx.table_ki, cfg.l_r);
  ctx.rx_sel = *rx_sel;  // all_combos is never empty
  ctx.f_rf_k = beams_from_combo(shared.codebook, ctx.rx_sel.tx_combo);
  ctx.w_rf_i = beams_from_combo(shared.codebook, ctx.rx_sel.rx_combo);
  ctx.eff_ki = effective_channel(ctx.h_ki, ctx.f_rf_k, ctx.w_rf_i);
  ctx.bf_ki = eigen_bb(ctx.eff_ki, cfg.n_s);
  return ctx;
}

struct MethodTrialOutput {
  TrialRecord record;
  std::vector<double> se_tx, se_rx;  // per snr point
};

MethodTrialOutput run_method_trial(const ScenarioConfig& cfg, const Shared& shared,
                                   const TrialContext& ctx, Method method,
                                   const EtaConstants& eta) {
  MethodTrialOutput out;
  TrialRecord& rec = out.record;
  const int c = shared.codebook.num_beams();

  FeasibleSet fs;
  bool constrained = false;
  switch (method) {
    case Method::kProposedC3:
      fs = build_feasible_set(shared.codebook, ctx.h_ii, cfg.l_t, eta,
                              ConditionVariant::kC3SvdRfOnly, nullptr, rec.ops, cfg.link);
      constrained = true;
      break;
    case Method::kProposedC4:
      fs = build_feasible_set(shared.codebook, ctx.h_ii, cfg.l_t, eta,
                              ConditionVariant::kC4ColNorm, nullptr, rec.ops, cfg.link);
      constrained = true;
      break;
    case Method::kProposedC4Pruned:
      fs = build_feasible_set_pruned(shared.codebook, ctx.h_ii, cfg.l_t, eta,
                                     ConditionVariant::kC4ColNorm, nullptr, rec.ops, cfg.link);
      constrained = true;
      break;
    case Method::kPowerReduction:
    case Method::kIdealFd:
      break;
  }

  bool use_beta = method == Method::kPowerReduction;
  if (constrained) {
    if (fs.empty()) {
      rec.infeasible = true;  // structured fallback: power-reduced full sweep
      use_beta = true;
    } else {
      const Allowlist allowlist = extract_allowlist(fs, shared.codebook);
      rec.allowlist = allowlist.beam_ids;
    }
  }

  const bool reduced = constrained && !rec.infeasible;
  rec.measurements =
      measurement_count(reduced ? static_cast<int>(rec.allowlist.size()) : c, c, c, c, c);

  const FeasibleSet& pool = reduced ? fs : shared.all_combos;
  const auto selection = select_rf(pool, ctx.table_ij, cfg.l_r);
  rec.tx_combo = selection->tx_combo;
  rec.rx_combo = selection->rx_combo;

  const CMatrix f_rf_i = beams_from_combo(shared.codebook, selection->tx_combo);
  const CMatrix w_rf_j = beams_from_combo(shared.codebook, selection->rx_combo);
  const FreqChannel eff_ij = effective_channel(ctx.h_ij, f_rf_i, w_rf_j);
  const DigitalBeamformers bf_ij = eigen_bb(eff_ij, cfg.n_s);
  const FreqChannel eff_si = effective_channel(ctx.h_ii, f_rf_i, ctx.w_rf_i);

  const ElementCheck lna = check_c1(ctx.h_ii, f_rf_i, bf_ij.f_bb_per_u, nullptr, eta, cfg.n_s);
  const ElementCheck adc = check_c1(ctx.h_ii, f_rf_i, bf_ij.f_bb_per_u, &ctx.w_rf_i, eta, cfg.n_s);
  const bool full_power_ok = lna.pass && adc.pass;

  if (use_beta)
    rec.beta = power_reduction_baseline(ctx.h_ii, f_rf_i, bf_ij.f_bb_per_u, ctx.w_rf_i, eta,
                                        cfg.n_s);
  // With the power scaled back the caps hold by construction; otherwise the
  // chain stays linear only if the full-power checks passed.
  const bool saturation_ok = use_beta || full_power_ok;
  rec.saturated = !saturation_ok && method != Method::kIdealFd;

  const bool ideal = method == Method::kIdealFd;
  out.se_tx.reserve(cfg.snr_grid_db.size());
  out.se_rx.reserve(cfg.snr_grid_db.size());
  for (double snr_db : cfg.snr_grid_db) {
    const double snr = db_to_linear(snr_db);
    out.se_tx.push_back(
        spectral_efficiency(eff_ij, bf_ij.f_bb_per_u, bf_ij.w_bb_per_u, snr * rec.beta, cfg.n_s));
    if (ideal || saturation_ok) {
      out.se_rx.push_back(
          spectral_efficiency(ctx.eff_ki, ctx.bf_ki.f_bb_per_u, ctx.bf_ki.w_bb_per_u, snr, cfg.n_s));
    } else {
      const double inr = snr * shared.inr_over_snr * rec.beta;
      const ResidualSi residual = digital_sic(eff_si, bf_ij.f_bb_per_u, ctx.bf_ki.w_bb_per_u, inr,
                                              cfg.n_s, false, false);
      out.se_rx.push_back(spectral_efficiency(ctx.eff_ki, ctx.bf_ki.f_bb_per_u,
                                              ctx.bf_ki.w_bb_per_u, snr, cfg.n_s, &residual));
    }
  }
  return out;
}

EvalResult finalize(Method method, const ScenarioConfig& cfg,
                    std::vector<MethodTrialOutput>&& outputs) {
  EvalResult result;
  result.method = method;
  result.snr_db = cfg.snr_grid_db;
  const size_t points = cfg.snr_grid_db.size();
  result.se_tx.assign(points, 0.0);
  result.se_rx.assign(points, 0.0);
  result.se_sum.assign(points, 0.0);

  double allow_sum = 0.0, meas_tx = 0.0, meas_total = 0.0;
  double svd = 0.0, colnorm = 0.0, combo_tests = 0.0, beta = 0.0;
  int saturated = 0, infeasible = 0;
  for (const MethodTrialOutput& out : outputs) {
    for (size_t s = 0; s < points; ++s) {
      result.se_tx[s] += out.se_tx[s];
      result.se_rx[s] += out.se_rx[s];
    }
    allow_sum += static_cast<double>(out.record.allowlist.size());
    meas_tx += static_cast<double>(out.record.measurements.tx_link);
    meas_total += static_cast<double>(out.record.measurements.total);
    svd += static_cast<double>(out.record.ops.svd_count);
    colnorm += static_cast<double>(out.record.ops.colnorm_count);
    combo_tests += static_cast<double>(out.record.ops.combo_tests);
    beta += out.record.beta;
    saturated += out.record.saturated ? 1 : 0;
    infeasible += out.record.infeasible ? 1 : 0;
  }
  const double n = static_cast<double>(outputs.size());
  for (size_t s = 0; s < points; ++s) {
    result.se_tx[s] /= n;
    result.se_rx[s] /= n;
    result.se_sum[s] = result.se_tx[s] + result.se_rx[s];
  }
  result.allowlist_size_mean = allow_sum / n;
  result.meas_tx_mean = meas_tx / n;
  result.meas_total_mean = meas_total / n;
  result.svd_mean = svd / n;
  result.colnorm_mean = colnorm / n;
  result.combo_tests_mean = combo_tests / n;
  result.beta_mean = beta / n;
  result.saturated_frac = static_cast<double>(saturated) / n;
  result.infeasible_frac = static_cast<double>(infeasible) / n;
  result.trial_records.reserve(outputs.size());
  for (MethodTrialOutput& out : outputs) result.trial_records.push_back(std::move(out.record));
  return result;
}

Shared make_shared_state(const ScenarioConfig& cfg) {
  Shared shared;
  shared.codebook = gen_dft_codebook(cfg.geometry);
  shared.eta = derive_eta(cfg.thresholds, cfg.num_subcarriers, cfg.p_tx_dbm, cfg.g_sq_si_db);
  shared.all_combos = all_combinations(shared.codebook, cfg.l_t);
  shared.inr_over_snr = db_to_linear(cfg.g_sq_si_db - cfg.g_sq_desired_db);
  return shared;
}

}  // namespace

std::vector<EvalResult> run_scenario_methods(const ScenarioConfig& cfg, const SiSource& si_source,
                                             const std::vector<Method>& methods) {
  cfg.validate();
  if (!si_source.stochastic && si_source.paths.empty())
    throw std::invalid_argument("run_scenario: fixed path source with no paths");
  const Shared shared = make_shared_state(cfg);

  std::vector<std::vector<MethodTrialOutput>> per_method(methods.size());
  for (auto& v : per_method) v.reserve(static_cast<size_t>(cfg.trials));

  for (int trial = 0; trial < cfg.trials; ++trial) {
    const TrialContext ctx = make_trial_context(cfg, si_source, shared, trial);
    for (size_t m = 0; m < methods.size(); ++m)
      per_method[m].push_back(run_method_trial(cfg, shared, ctx, methods[m], shared.eta));
  }

  std::vector<EvalResult> results;
  results.reserve(methods.size());
  for (size_t m = 0; m < methods.size(); ++m)
    results.push_back(finalize(methods[m], cfg, std::move(per_method[m])));
  return results;
}

EvalResult run_scenario(const ScenarioConfig& cfg, const SiSource& si_source, Method method) {
  return std::move(run_scenario_methods(cfg, si_source, {method}).front());
}

std::vector<RxSweepCell> sweep_rx_components(const ScenarioConfig& cfg, const SiSource& si_source,
                                             const std::vector<double>& lna_grid_dbm,
                                             const std::vector<int>& adc_bits_grid,
                                             const std::vector<Method>& methods) {
  cfg.validate();
  if (lna_grid_dbm.empty() || adc_bits_grid.empty())
    throw std::invalid_argument("sweep_rx_components: empty grid");
  const Shared shared = make_shared_state(cfg);

  struct Cell {
    double lna;
    int bits;
    EtaConstants eta;
  };
  std::vector<Cell> cells;
  for (double lna : lna_grid_dbm) {
    for (int bits : adc_bits_grid) {
      const SaturationThresholds t = SaturationThresholds::from_adc_bits(
          lna, bits, cfg.thresholds.noise_floor_dbm, cfg.thresholds.papr_margin_db);
      cells.push_back({lna, bits, derive_eta(t, cfg.num_subcarriers, cfg.p_tx_dbm, cfg.g_sq_si_db)});
    }
  }

  std::vector<std::vector<std::vector<MethodTrialOutput>>> outputs(
      cells.size(), std::vector<std::vector<MethodTrialOutput>>(methods.size()));

  for (int trial = 0; trial < cfg.trials; ++trial) {
    const TrialContext ctx = make_trial_context(cfg, si_source, shared, trial);
    for (size_t c = 0; c < cells.size(); ++c)
      for (size_t m = 0; m < methods.size(); ++m)
        outputs[c][m].push_back(run_method_trial(cfg, shared, ctx, methods[m], cells[c].eta));
  }

  std::vector<RxSweepCell> result;
  result.reserve(cells.size() * methods.size());
  for (size_t c = 0; c < cells.size(); ++c) {
    for (size_t m = 0; m < methods.size(); ++m) {
      RxSweepCell cell;
      cell.p_lna_dbm = cells[c].lna;
      cell.adc_bits = cells[c].bits;
      cell.result = finalize(methods[m], cfg, std::move(outputs[c][m]));
      result.push_back(std::move(cell));
    }
  }
  return result;
}

}  // namespace fdbeam
