#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "fdbeam/channel.hpp"
#include "fdbeam/config.hpp"
#include "fdbeam/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fdbeam;

namespace {

constexpr const char* kVersion = "0.1.0";

struct CommonOptions {
  std::string config_file;
  std::string si = "stochastic";
  std::string out_dir = "out";
  std::string method = "all";
  std::string variant;
  std::int64_t seed = -1;
  int trials = -1;
};

void add_common_flags(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--config", opt.config_file, "configuration file (INI-style sections)");
  cmd->add_option("--si", opt.si, "self-interference source: 'stochastic' or a path-list CSV");
  cmd->add_option("--out", opt.out_dir, "output directory");
  cmd->add_option("--seed", opt.seed, "override the scenario seed");
  cmd->add_option("--trials", opt.trials, "override the trial count");
  cmd->add_option("--variant", opt.variant, "condition tier: c3, c4 or c4-pruned");
}

Config load_config(const CommonOptions& opt) {
  Config config;
  if (!opt.config_file.empty()) config.load_file(opt.config_file);
  config.apply_environment();
  if (opt.seed >= 0) config.set("scenario.seed", std::to_string(opt.seed));
  if (opt.trials >= 0) config.set("scenario.trials", std::to_string(opt.trials));
  if (!opt.variant.empty()) {
    parse_variant(opt.variant);  // validate early
    config.set("scenario.variant", opt.variant == "c4-pruned" ? "c4" : opt.variant);
  }
  return config;
}

SiSource load_si_source(const CommonOptions& opt) {
  if (opt.si == "stochastic") return SiSource::make_stochastic();
  return SiSource::from_paths(load_path_csv(opt.si));
}

std::vector<Method> parse_methods(const std::string& spec) {
  if (spec == "all")
    return {Method::kProposedC3, Method::kProposedC4, Method::kProposedC4Pruned,
            Method::kPowerReduction, Method::kIdealFd};
  std::vector<Method> methods;
  std::stringstream ss(spec);
  std::string token;
  while (std::getline(ss, token, ',')) methods.push_back(method_from_name(token));
  if (methods.empty()) throw ConfigError("no method selected");
  return methods;
}

void write_manifest(const fs::path& out_dir, const std::string& command, const Config& config,
                    std::uint64_t seed, const std::vector<std::string>& outputs,
                    const json& counters) {
  json manifest;
  manifest["artifact"] = "fdbeam";
  manifest["version"] = kVersion;
  manifest["command"] = command;
  manifest["seed"] = seed;
  manifest["config"] = json(config.values());
  manifest["outputs"] = outputs;
  manifest["counters"] = counters;

  const fs::path final_path = out_dir / "manifest.json";
  const fs::path tmp_path = out_dir / "manifest.json.tmp";
  {
    std::ofstream out(tmp_path);
    if (!out) throw std::runtime_error("cannot write manifest: " + tmp_path.string());
    out << manifest.dump(2) << '\n';
  }
  fs::rename(tmp_path, final_path);
}

json counters_summary(const std::vector<EvalResult>& results) {
  json counters = json::object();
  for (const EvalResult& r : results) {
    counters[method_name(r.method)] = {
        {"svd_mean", r.svd_mean},
        {"colnorm_mean", r.colnorm_mean},
        {"combo_tests_mean", r.combo_tests_mean},
        {"meas_tx_mean", r.meas_tx_mean},
        {"meas_total_mean", r.meas_total_mean},
        {"allowlist_size_mean", r.allowlist_size_mean},
        {"infeasible_frac", r.infeasible_frac},
    };
  }
  return counters;
}

int cmd_run(const CommonOptions& opt) {
  const Config config = load_config(opt);
  const ScenarioConfig cfg = config.to_scenario();
  const SiSource si = load_si_source(opt);
  const std::vector<Method> methods = parse_methods(opt.method);

  const std::vector<EvalResult> results = run_scenario_methods(cfg, si, methods);

  fs::create_directories(opt.out_dir);
  const fs::path csv_path = fs::path(opt.out_dir) / "results.csv";
  const bool has_ideal =
      std::any_of(results.begin(), results.end(),
                  [](const EvalResult& r) { return r.method == Method::kIdealFd; });
  write_results_csv(csv_path.string(), results, has_ideal);
  write_manifest(opt.out_dir, "run", config, cfg.seed, {"results.csv"},
                 counters_summary(results));
  std::cout << "wrote " << csv_path.string() << "\n";

  // Constrained methods that never found a feasible combination signal an
  // unusable configuration.
  bool any_constrained = false;
  bool all_infeasible = true;
  for (const EvalResult& r : results) {
    if (r.method == Method::kPowerReduction || r.method == Method::kIdealFd) continue;
    any_constrained = true;
    if (r.infeasible_frac < 1.0) all_infeasible = false;
  }
  if (any_constrained && all_infeasible) {
    std::cerr << "every trial of every constrained method was infeasible\n";
    return 2;
  }
  return 0;
}

int cmd_sweep_rx(const CommonOptions& opt) {
  const Config config = load_config(opt);
  ScenarioConfig cfg = config.to_scenario();
  const Config::SweepSpec sweep = config.to_sweep();
  cfg.snr_grid_db = sweep.snr_db;
  cfg.trials = sweep.trials;
  if (opt.trials >= 0) cfg.trials = opt.trials;
  cfg.validate();

  const SiSource si = load_si_source(opt);
  std::vector<Method> methods{Method::kProposedC3, Method::kProposedC4};
  if (opt.method != "all") methods = parse_methods(opt.method);

  const auto cells =
      sweep_rx_components(cfg, si, sweep.lna_grid_dbm, sweep.adc_bits_grid, methods);

  fs::create_directories(opt.out_dir);
  const fs::path csv_path = fs::path(opt.out_dir) / "sweep.csv";
  write_sweep_csv(csv_path.string(), cells);

  json counters = json::object();
  for (const RxSweepCell& cell : cells) {
    const std::string key = method_name(cell.result.method) + "@lna=" +
                            format_double(cell.p_lna_dbm) + ",bits=" +
                            std::to_string(cell.adc_bits);
    counters[key] = {{"allowlist_size_mean", cell.result.allowlist_size_mean},
                     {"se_sum_first", cell.result.se_sum.front()}};
  }
  write_manifest(opt.out_dir, "sweep-rx", config, cfg.seed, {"sweep.csv"}, counters);
  std::cout << "wrote " << csv_path.string() << "\n";
  return 0;
}

int cmd_allowlist(const CommonOptions& opt) {
  const Config config = load_config(opt);
  const ScenarioConfig cfg = config.to_scenario();
  const auto [variant, pruned] = parse_variant(
      opt.variant.empty() ? config.get_string("scenario.variant") : opt.variant);

  FreqChannel si_chan;
  if (opt.si == "stochastic") {
    auto rng = make_trial_rng(cfg.seed, 0);
    si_chan = build_si_channel(cfg, gen_si_farfield_paths(rng, cfg));
  } else {
    si_chan = build_si_channel(cfg, load_path_csv(opt.si));
  }

  const Codebook codebook = gen_dft_codebook(cfg.geometry);
  const EtaConstants eta =
      derive_eta(cfg.thresholds, cfg.num_subcarriers, cfg.p_tx_dbm, cfg.g_sq_si_db);

  OpCounter counter;
  const FeasibleSet feasible =
      pruned ? build_feasible_set_pruned(codebook, si_chan, cfg.l_t, eta, variant, nullptr,
                                         counter, cfg.link)
             : build_feasible_set(codebook, si_chan, cfg.l_t, eta, variant, nullptr, counter,
                                  cfg.link);
  const Allowlist allowlist = extract_allowlist(feasible, codebook);

  fs::create_directories(opt.out_dir);
  const fs::path dump_path = fs::path(opt.out_dir) / "allowlist.txt";
  write_allowlist_dump(dump_path.string(), feasible, allowlist, eta, codebook);

  json counters = {{"svd_count", counter.svd_count},
                   {"colnorm_count", counter.colnorm_count},
                   {"combo_tests", counter.combo_tests},
                   {"feasible_combos", feasible.size()},
                   {"allowlist_size", allowlist.size()}};
  write_manifest(opt.out_dir, "allowlist", config, cfg.seed, {"allowlist.txt"}, counters);
  std::cout << "wrote " << dump_path.string() << " (" << feasible.size() << " combos, "
            << allowlist.size() << " beams)\n";
  if (feasible.empty()) {
    std::cerr << "feasible set is empty for the given budgets\n";
    return 2;
  }
  return 0;
}

int cmd_array_factor(const CommonOptions& opt) {
  const Config config = load_config(opt);
  const ScenarioConfig cfg = config.to_scenario();
  const Codebook codebook = gen_dft_codebook(cfg.geometry);

  fs::create_directories(opt.out_dir);
  const fs::path csv_path = fs::path(opt.out_dir) / "array_factor.csv";
  write_array_factor_csv(csv_path.string(), codebook, cfg.geometry);
  write_manifest(opt.out_dir, "array-factor", config, cfg.seed, {"array_factor.csv"},
                 {{"beams", codebook.num_beams()}});
  std::cout << "wrote " << csv_path.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// validate: re-run the structural properties on fresh random instances.

struct Validator {
  int failures = 0;

  void report(const std::string& name, bool pass, const std::string& detail = "") {
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << name;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << "\n";
    if (!pass) ++failures;
  }
};

int cmd_validate(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Validator v;

  const auto random_matrix = [&](int rows, int cols) {
    std::normal_distribution<double> normal(0.0, 1.0);
    CMatrix m(rows, cols);
    for (int c = 0; c < cols; ++c)
      for (int r = 0; r < rows; ++r) m(r, c) = Complex(normal(rng), normal(rng));
    return m;
  };
  const auto random_unit_cols = [&](int rows, int cols) {
    CMatrix m = random_matrix(rows, cols);
    for (int c = 0; c < cols; ++c) m.col(c) /= m.col(c).norm();
    return m;
  };
  const auto random_channel = [&](int rows, int cols, int u) {
    FreqChannel chan;
    for (int i = 0; i < u; ++i) chan.per_subcarrier.push_back(random_matrix(rows, cols));
    return chan;
  };

  {  // relaxation-tier ordering
    bool ok = true;
    for (int i = 0; i < 1000 && ok; ++i) {
      const int n_r = 2 + static_cast<int>(rng() % 7);
      const int n_t = 2 + static_cast<int>(rng() % 7);
      const int l_t = 1 + static_cast<int>(rng() % 3);
      const int u = 1 + static_cast<int>(rng() % 8);
      const FreqChannel si = random_channel(n_r, n_t, u);
      const CMatrix f_rf = random_unit_cols(n_t, l_t);
      const TierGap gap = theorem1_gap(si, f_rf, nullptr);
      ok = gap.c4_lhs >= gap.c3_lhs - 1e-12 * std::max(1.0, gap.c3_lhs);
    }
    v.report("column-norm tier dominates the singular-value tier", ok, "1000 instances");
  }

  {  // column bound
    bool ok = true;
    for (int i = 0; i < 1000 && ok; ++i) {
      const CMatrix a =
          random_matrix(1 + static_cast<int>(rng() % 8), 1 + static_cast<int>(rng() % 8));
      double col_sum = 0.0;
      for (int c = 0; c < a.cols(); ++c) col_sum += a.col(c).squaredNorm();
      ok = sigma_max_sq(a) <= col_sum + 1e-12 * std::max(1.0, col_sum);
    }
    v.report("spectral norm bounded by the column-power sum", ok, "1000 matrices");
  }

  {  // full ladder on randomized thresholds
    bool ok = true;
    for (int i = 0; i < 300 && ok; ++i) {
      const int n_r = 2 + static_cast<int>(rng() % 5);
      const int n_t = 2 + static_cast<int>(rng() % 5);
      const int n_s = 2;
      const int l_t = 2 + static_cast<int>(rng() % 2);
      const int u = 1 + static_cast<int>(rng() % 4);
      const FreqChannel si = random_channel(n_r, n_t, u);
      const CMatrix f_rf = random_unit_cols(n_t, l_t);
      const CMatrix w_rf = random_unit_cols(n_r, 2);
      std::vector<CMatrix> f_bb;
      for (int k = 0; k < u; ++k) {
        CMatrix m = random_matrix(l_t, n_s);
        m *= std::sqrt(n_s * unif(rng)) / m.norm();
        f_bb.push_back(std::move(m));
      }
      const TierGap gap = theorem1_gap(si, f_rf, nullptr);
      EtaConstants eta;
      eta.eta_lna = gap.c3_lhs * std::pow(10.0, 0.6 * (unif(rng) - 0.5));
      eta.eta_adc = eta.eta_lna;
      const bool p4 = check_c4(si, f_rf, nullptr, eta).pass;
      const bool p3 = check_c3(si, f_rf, nullptr, eta).pass;
      const bool p2 = check_c2(si, f_rf, f_bb, nullptr, eta, n_s).pass;
      const bool p1 = check_c1(si, f_rf, f_bb, nullptr, eta, n_s).pass;
      if (p4 && !p3) ok = false;
      if (p3 && !p2) ok = false;
      if (p2 && !p1) ok = false;
      const bool q4 = check_c4(si, f_rf, &w_rf, eta).pass;
      const bool q3 = check_c3(si, f_rf, &w_rf, eta).pass;
      const bool q2 = check_c2(si, f_rf, f_bb, &w_rf, eta, n_s).pass;
      const bool q1 = check_c1(si, f_rf, f_bb, &w_rf, eta, n_s).pass;
      if (q4 && !q3) ok = false;
      if (q3 && !q2) ok = false;
      if (q2 && !q1) ok = false;
    }
    v.report("sufficiency ladder across all four tiers", ok, "300 instances, both budgets");
  }

  {  // pruning equivalence
    bool ok = true;
    for (int i = 0; i < 50 && ok; ++i) {
      Codebook cb;
      cb.beams = random_unit_cols(4, 8);
      for (int b = 1; b <= 8; ++b) cb.beam_ids.push_back(b);
      const FreqChannel si = random_channel(4, 4, 2);
      OpCounter probe_counter;
      const FeasibleSet probe =
          build_feasible_set(cb, si, 2, EtaConstants{1e300, 1e300},
                             ConditionVariant::kC4ColNorm, nullptr, probe_counter);
      std::vector<double> sums;
      for (const BeamCombo& combo : probe.combos) {
        CMatrix f(4, 2);
        f.col(0) = cb.beam(combo[0]);
        f.col(1) = cb.beam(combo[1]);
        sums.push_back(check_c4(si, f, nullptr, EtaConstants{0.0, 0.0}).lhs);
      }
      std::sort(sums.begin(), sums.end());
      const size_t cut = static_cast<size_t>(unif(rng) * static_cast<double>(sums.size() - 2));
      const double eta_val = 0.5 * (sums[cut] + sums[cut + 1]);
      OpCounter a, b;
      const FeasibleSet plain = build_feasible_set(cb, si, 2, EtaConstants{eta_val, eta_val},
                                                   ConditionVariant::kC4ColNorm, nullptr, a);
      const FeasibleSet pruned = build_feasible_set_pruned(
          cb, si, 2, EtaConstants{eta_val, eta_val}, ConditionVariant::kC4ColNorm, nullptr, b);
      ok = plain.combos == pruned.combos && b.combo_tests <= a.combo_tests;
      if (plain.size() < probe.size() && b.combo_tests >= a.combo_tests) ok = false;
    }
    v.report("suffix-skip construction equals exhaustive construction", ok, "50 instances");
  }

  {  // budget monotonicity
    bool ok = true;
    Codebook cb;
    cb.beams = random_unit_cols(4, 6);
    for (int b = 1; b <= 6; ++b) cb.beam_ids.push_back(b);
    const FreqChannel si = random_channel(4, 4, 3);
    OpCounter counter;
    std::set<BeamCombo> previous;
    for (double eta_val : {0.5, 2.0, 8.0, 32.0, 1e6}) {
      const FeasibleSet feasible =
          build_feasible_set(cb, si, 2, EtaConstants{eta_val, eta_val},
                             ConditionVariant::kC4ColNorm, nullptr, counter);
      const std::set<BeamCombo> current(feasible.combos.begin(), feasible.combos.end());
      for (const BeamCombo& combo : previous)
        if (!current.count(combo)) ok = false;
      previous = current;
    }
    v.report("feasible sets grow with the budget", ok);
  }

  std::cout << (v.failures == 0 ? "all properties hold\n" : "property violations found\n");
  return v.failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mmWave full-duplex beam-codebook reduction toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonOptions opt;
  CLI::App* run = app.add_subcommand("run", "SNR sweep over the selected methods");
  add_common_flags(run, opt);
  run->add_option("--method", opt.method,
                  "comma-separated methods or 'all' (proposed_c3, proposed_c4, "
                  "proposed_c4_pruned, power_reduction, ideal_fd)");

  CLI::App* sweep = app.add_subcommand("sweep-rx", "receiver component sweep");
  add_common_flags(sweep, opt);
  sweep->add_option("--method", opt.method, "methods to sweep (default proposed_c3,proposed_c4)");

  CLI::App* allowlist = app.add_subcommand("allowlist", "construct and dump one allowlist");
  add_common_flags(allowlist, opt);

  CLI::App* array_factor = app.add_subcommand("array-factor", "emit codebook gain curves");
  add_common_flags(array_factor, opt);

  std::uint64_t validate_seed = 2024;
  CLI::App* validate = app.add_subcommand("validate", "re-check structural properties");
  validate->add_option("--seed", validate_seed, "random seed for the property suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return cmd_run(opt);
    if (sweep->parsed()) return cmd_sweep_rx(opt);
    if (allowlist->parsed()) return cmd_allowlist(opt);
    if (array_factor->parsed()) return cmd_array_factor(opt);
    if (validate->parsed()) return cmd_validate(validate_seed);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
