#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "fdbeam/allowlist.hpp"
#include "fdbeam/channel.hpp"
#include "test_util.hpp"

using namespace fdbeam;

namespace {

Codebook random_codebook(std::mt19937_64& rng, int n, int c) {
  Codebook cb;
  cb.beams = testutil::random_unit_columns(rng, n, c);
  for (int i = 1; i <= c; ++i) cb.beam_ids.push_back(i);
  return cb;
}

std::set<BeamCombo> combo_set(const FeasibleSet& fs) {
  return std::set<BeamCombo>(fs.combos.begin(), fs.combos.end());
}

CMatrix beams_from_combo_helper(const Codebook& cb, const BeamCombo& combo) {
  CMatrix m(cb.beam_length(), static_cast<Eigen::Index>(combo.size()));
  for (size_t i = 0; i < combo.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = cb.beam(combo[i]);
  return m;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("infinite budgets admit every combination") {
  auto rng = testutil::make_rng(201);
  const Codebook cb = random_codebook(rng, 4, 6);
  const FreqChannel si = testutil::random_freq_channel(rng, 4, 4, 3);
  OpCounter counter;
  const FeasibleSet fs = build_feasible_set(cb, si, 2, EtaConstants{kInf, kInf},
                                            ConditionVariant::kC4ColNorm, nullptr, counter);
  CHECK(fs.size() == binomial(6, 2));
}

TEST_CASE("vanishing budgets with nonzero interference admit nothing") {
  auto rng = testutil::make_rng(203);
  const Codebook cb = random_codebook(rng, 4, 5);
  const FreqChannel si = testutil::random_freq_channel(rng, 4, 4, 3);
  OpCounter counter;
  const FeasibleSet fs = build_feasible_set(cb, si, 2, EtaConstants{1e-30, 1e-30},
                                            ConditionVariant::kC4ColNorm, nullptr, counter);
  CHECK(fs.empty());
}

TEST_CASE("column-norm construction matches a direct per-combo oracle and nests in the svd set") {
  auto rng = testutil::make_rng(207);
  for (int round = 0; round < 10; ++round) {
    const Codebook cb = random_codebook(rng, 6, 6);
    const FreqChannel si = testutil::random_freq_channel(rng, 6, 6, 4);

    // Calibrate the budget between two combo costs so the outcome is
    // non-trivial and insensitive to summation order.
    OpCounter scratch;
    std::vector<double> costs;
    {
      const FeasibleSet probe = build_feasible_set(cb, si, 2, EtaConstants{kInf, kInf},
                                                   ConditionVariant::kC4ColNorm, nullptr, scratch);
      for (const BeamCombo& combo : probe.combos)
        costs.push_back(check_c4(si, beams_from_combo_helper(cb, combo), nullptr,
                                 EtaConstants{0.0, 0.0})
                            .lhs);
    }
    std::sort(costs.begin(), costs.end());
    const double eta_val = 0.5 * (costs[costs.size() / 2] + costs[costs.size() / 2 + 1]);
    const EtaConstants eta{eta_val, eta_val};

    OpCounter counter;
    const FeasibleSet c4 =
        build_feasible_set(cb, si, 2, eta, ConditionVariant::kC4ColNorm, nullptr, counter);
    const FeasibleSet c3 =
        build_feasible_set(cb, si, 2, eta, ConditionVariant::kC3SvdRfOnly, nullptr, counter);

    // oracle: evaluate the column-norm condition per combination directly
    std::set<BeamCombo> expected;
    const FeasibleSet all = all_combinations(cb, 2);
    for (const BeamCombo& combo : all.combos) {
      const ScalarCheck check =
          check_c4(si, beams_from_combo_helper(cb, combo), nullptr, eta);
      if (check.pass) expected.insert(combo);
    }
    CHECK(combo_set(c4) == expected);

    const std::set<BeamCombo> c3_set = combo_set(c3);
    for (const BeamCombo& combo : c4.combos) CHECK(c3_set.count(combo) == 1);
  }
}

TEST_CASE("pruned construction returns the identical set with fewer full tests") {
  auto rng = testutil::make_rng(211);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int round = 0; round < 50; ++round) {
    const Codebook cb = random_codebook(rng, 4, 8);
    const FreqChannel si = testutil::random_freq_channel(rng, 4, 4, 2);

    OpCounter probe_counter;
    const FeasibleSet probe = build_feasible_set(cb, si, 3, EtaConstants{kInf, kInf},
                                                 ConditionVariant::kC4ColNorm, nullptr,
                                                 probe_counter);
    std::vector<double> sums;
    for (const BeamCombo& combo : probe.combos)
      sums.push_back(
          check_c4(si, beams_from_combo_helper(cb, combo), nullptr, EtaConstants{0.0, 0.0}).lhs);
    std::sort(sums.begin(), sums.end());
    const size_t cut = static_cast<size_t>(unif(rng) * static_cast<double>(sums.size() - 2));
    const double eta_val = 0.5 * (sums[cut] + sums[cut + 1]);
    const EtaConstants eta{eta_val, eta_val};

    OpCounter plain_counter, pruned_counter;
    const FeasibleSet plain =
        build_feasible_set(cb, si, 3, eta, ConditionVariant::kC4ColNorm, nullptr, plain_counter);
    const FeasibleSet pruned = build_feasible_set_pruned(cb, si, 3, eta,
                                                         ConditionVariant::kC4ColNorm, nullptr,
                                                         pruned_counter);
    CHECK(plain.combos == pruned.combos);
    CHECK(pruned_counter.combo_tests <= plain_counter.combo_tests);
    if (plain.size() < binomial(8, 3))
      CHECK(pruned_counter.combo_tests < plain_counter.combo_tests);
    CHECK(pruned_counter.colnorm_count == plain_counter.colnorm_count);
  }
}

TEST_CASE("pruned construction tests nothing when every beam alone is over budget") {
  auto rng = testutil::make_rng(213);
  const Codebook cb = random_codebook(rng, 4, 6);
  const FreqChannel si = testutil::random_freq_channel(rng, 4, 4, 3);
  OpCounter counter;
  const FeasibleSet fs = build_feasible_set_pruned(cb, si, 2, EtaConstants{1e-30, 1e-30},
                                                   ConditionVariant::kC4ColNorm, nullptr, counter);
  CHECK(fs.empty());
  CHECK(counter.combo_tests == 0);
}

TEST_CASE("pruned construction cannot skip anything under an infinite budget") {
  auto rng = testutil::make_rng(217);
  const Codebook cb = random_codebook(rng, 4, 7);
  const FreqChannel si = testutil::random_freq_channel(rng, 4, 4, 2);
  OpCounter counter;
  const FeasibleSet fs = build_feasible_set_pruned(cb, si, 2, EtaConstants{kInf, kInf},
                                                   ConditionVariant::kC4ColNorm, nullptr, counter);
  CHECK(fs.size() == binomial(7, 2));
  CHECK(counter.combo_tests == binomial(7, 2));
}

TEST_CASE("pruned construction rejects the singular-value tier") {
  auto rng = testutil::make_rng(219);
  const Codebook cb = random_codebook(rng, 4, 5);
  const FreqChannel si = testutil::random_freq_channel(rng, 4, 4, 2);
  OpCounter counter;
  CHECK_THROWS_AS(build_feasible_set_pruned(cb, si, 2, EtaConstants{1.0, 1.0},
                                            ConditionVariant::kC3SvdRfOnly, nullptr, counter),
                  std::invalid_argument);
}

TEST_CASE("allowlist extraction unions the combo ids") {
  auto rng = testutil::make_rng(223);
  const Codebook cb = random_codebook(rng, 4, 5);
  FeasibleSet fs;
  fs.combos = {{2, 3, 4}, {3, 4, 5}};
  const Allowlist al = extract_allowlist(fs, cb);
  CHECK(al.beam_ids == std::vector<int>{2, 3, 4, 5});

  FeasibleSet empty;
  CHECK(extract_allowlist(empty, cb).beam_ids.empty());

  const FeasibleSet all = all_combinations(cb, 3);
  CHECK(extract_allowlist(all, cb).beam_ids == std::vector<int>{1, 2, 3, 4, 5});
}

TEST_CASE("rx-side restraint keeps everything under loose budgets") {
  auto rng = testutil::make_rng(227);
  const Codebook cb_rx = random_codebook(rng, 4, 5);
  const FreqChannel si = testutil::random_freq_channel(rng, 4, 3, 2);
  const CMatrix f_rf = testutil::random_unit_columns(rng, 3, 2);
  OpCounter counter;
  const FeasibleSet loose =
      restrain_rx_link(f_rf, cb_rx, si, kInf, ConditionVariant::kC4ColNorm, counter);
  CHECK(loose.size() == binomial(5, 2));

  FreqChannel zero_si;
  for (int u = 0; u < 2; ++u) zero_si.per_subcarrier.push_back(CMatrix::Zero(4, 3));
  const FeasibleSet zero =
      restrain_rx_link(f_rf, cb_rx, zero_si, 1e-30, ConditionVariant::kC3SvdRfOnly, counter);
  CHECK(zero.size() == binomial(5, 2));
}

TEST_CASE("rx-side restraint matches the direct combiner oracle") {
  auto rng = testutil::make_rng(229);
  for (auto variant : {ConditionVariant::kC4ColNorm, ConditionVariant::kC3SvdRfOnly}) {
    const Codebook cb_rx = random_codebook(rng, 4, 5);
    const FreqChannel si = testutil::random_freq_channel(rng, 4, 3, 3);
    const CMatrix f_rf = testutil::random_unit_columns(rng, 3, 2);

    // median budget over all combos, computed through the public kernels
    std::vector<double> lhs;
    const Codebook probe = cb_rx;
    const FeasibleSet all = all_combinations(probe, 2);
    for (const BeamCombo& combo : all.combos) {
      const CMatrix w = beams_from_combo_helper(cb_rx, combo);
      const EtaConstants free{0.0, 0.0};
      lhs.push_back(variant == ConditionVariant::kC4ColNorm
                        ? check_c4(si, f_rf, &w, free).lhs
                        : check_c3(si, f_rf, &w, free).lhs);
    }
    std::vector<double> sorted = lhs;
    std::sort(sorted.begin(), sorted.end());
    const double eta_adc = sorted[sorted.size() / 2];

    OpCounter counter;
    const FeasibleSet fs = restrain_rx_link(f_rf, cb_rx, si, eta_adc, variant, counter);
    std::set<BeamCombo> expected;
    for (size_t i = 0; i < all.combos.size(); ++i)
      if (lhs[i] <= eta_adc) expected.insert(all.combos[i]);
    CHECK(combo_set(fs) == expected);
  }
}

TEST_CASE("measurement accounting multiplies out") {
  const MeasurementCount full = measurement_count(64, 64, 64, 64, 64);
  CHECK(full.tx_link == 4096);
  CHECK(full.tx_baseline == 4096);
  CHECK(full.rx_link == 4096);
  CHECK(full.total == 8192);

  CHECK(measurement_count(0, 64, 64, 64, 64).tx_link == 0);
  CHECK(measurement_count(40, 64, 64, 64, 64).tx_link == 2560);
}

TEST_CASE("construction cost tallies follow the structural laws") {
  auto rng = testutil::make_rng(233);
  const int c = 6, l = 2, u = 4;
  const Codebook cb = random_codebook(rng, 5, c);
  const FreqChannel si = testutil::random_freq_channel(rng, 5, 5, u);
  const EtaConstants eta{1.0, 1.0};

  OpCounter c3_counter;
  build_feasible_set(cb, si, l, eta, ConditionVariant::kC3SvdRfOnly, nullptr, c3_counter);
  CHECK(c3_counter.svd_count == static_cast<std::uint64_t>(u) * binomial(c, l));
  CHECK(c3_counter.combo_tests == binomial(c, l));

  OpCounter c4_counter;
  build_feasible_set(cb, si, l, eta, ConditionVariant::kC4ColNorm, nullptr, c4_counter);
  CHECK(c4_counter.colnorm_count == static_cast<std::uint64_t>(u) * c);
  CHECK(c4_counter.svd_count == 0);
  CHECK(c4_counter.combo_tests == binomial(c, l));
}

TEST_CASE("feasible sets grow monotonically with the budget") {
  auto rng = testutil::make_rng(239);
  const Codebook cb = random_codebook(rng, 4, 6);
  const FreqChannel si = testutil::random_freq_channel(rng, 4, 4, 3);

  OpCounter counter;
  const FeasibleSet probe = build_feasible_set(cb, si, 2, EtaConstants{kInf, kInf},
                                               ConditionVariant::kC4ColNorm, nullptr, counter);
  std::vector<double> sums;
  for (const BeamCombo& combo : probe.combos)
    sums.push_back(
        check_c4(si, beams_from_combo_helper(cb, combo), nullptr, EtaConstants{0.0, 0.0}).lhs);
  std::sort(sums.begin(), sums.end());

  std::set<BeamCombo> previous;
  for (size_t i = 0; i < sums.size(); i += 3) {
    const EtaConstants eta{sums[i], sums[i]};
    const FeasibleSet fs =
        build_feasible_set(cb, si, 2, eta, ConditionVariant::kC4ColNorm, nullptr, counter);
    const std::set<BeamCombo> current = combo_set(fs);
    for (const BeamCombo& combo : previous) CHECK(current.count(combo) == 1);
    previous = current;
  }
}

TEST_CASE("every returned combination re-passes its condition independently") {
  auto rng = testutil::make_rng(241);
  for (auto variant : {ConditionVariant::kC4ColNorm, ConditionVariant::kC3SvdRfOnly}) {
    const Codebook cb = random_codebook(rng, 5, 6);
    const FreqChannel si = testutil::random_freq_channel(rng, 5, 5, 3);
    OpCounter counter;
    const FeasibleSet probe =
        build_feasible_set(cb, si, 2, EtaConstants{kInf, kInf}, variant, nullptr, counter);
    // pick a budget keeping roughly half
    std::vector<double> lhs;
    for (const BeamCombo& combo : probe.combos) {
      const CMatrix f = beams_from_combo_helper(cb, combo);
      const EtaConstants free{0.0, 0.0};
      lhs.push_back(variant == ConditionVariant::kC4ColNorm ? check_c4(si, f, nullptr, free).lhs
                                                            : check_c3(si, f, nullptr, free).lhs);
    }
    std::sort(lhs.begin(), lhs.end());
    const EtaConstants eta{lhs[lhs.size() / 2], lhs[lhs.size() / 2]};
    const FeasibleSet fs = build_feasible_set(cb, si, 2, eta, variant, nullptr, counter);
    CHECK(!fs.empty());
    for (const BeamCombo& combo : fs.combos)
      CHECK(recheck_combo(combo, cb, si, eta, variant, nullptr));
  }
}

TEST_CASE("builders reject invalid inputs") {
  auto rng = testutil::make_rng(251);
  const Codebook cb = random_codebook(rng, 4, 3);
  const FreqChannel si = testutil::random_freq_channel(rng, 4, 4, 2);
  OpCounter counter;
  CHECK_THROWS_AS(build_feasible_set(cb, si, 4, EtaConstants{1.0, 1.0},
                                     ConditionVariant::kC4ColNorm, nullptr, counter),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_feasible_set(Codebook{}, si, 1, EtaConstants{1.0, 1.0},
                                     ConditionVariant::kC4ColNorm, nullptr, counter),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_feasible_set(cb, si, 2, EtaConstants{1.0, 1.0},
                                     ConditionVariant::kC1Exact, nullptr, counter),
                  std::invalid_argument);
}
