#include "fdbeam/allowlist.hpp"

#include <algorithm>
#include <numeric>

namespace fdbeam {

namespace {

double lambda_max_submatrix(const CMatrix& gram, const std::vector<int>& cols) {
  const int l = static_cast<int>(cols.size());
  if (l == 1) return gram(cols[0], cols[0]).real();
  if (l == 2) {
    const double a = gram(cols[0], cols[0]).real();
    const double c = gram(cols[1], cols[1]).real();
    const double half_diff = 0.5 * (a - c);
    return 0.5 * (a + c) + std::sqrt(half_diff * half_diff + std::norm(gram(cols[0], cols[1])));
  }
  CMatrix sub(l, l);
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < l; ++j) sub(i, j) = gram(cols[i], cols[j]);
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sub, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

template <typename Fn>
void for_each_combination(int c, int l, Fn&& fn) {
  std::vector<int> idx(static_cast<size_t>(l));
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    fn(idx);
    int pos = l - 1;
    while (pos >= 0 && idx[static_cast<size_t>(pos)] == c - l + pos) --pos;
    if (pos < 0) break;
    ++idx[static_cast<size_t>(pos)];
    for (int k = pos + 1; k < l; ++k)
      idx[static_cast<size_t>(k)] = idx[static_cast<size_t>(k - 1)] + 1;
  }
}

void validate_build_inputs(const Codebook& codebook, const FreqChannel& si, int num_chains,
                           ConditionVariant variant, const CMatrix* w_rf) {
  if (codebook.num_beams() < 1) throw std::invalid_argument("build_feasible_set: empty codebook");
  if (num_chains < 1 || num_chains > codebook.num_beams())
    throw std::invalid_argument("build_feasible_set: num_chains must be in [1, C]");
  if (si.per_subcarrier.empty())
    throw std::invalid_argument("build_feasible_set: empty interference channel");
  if (si.cols() != codebook.beam_length())
    throw std::invalid_argument("build_feasible_set: channel/codebook dimension mismatch");
  if (w_rf && w_rf->rows() != si.rows())
    throw std::invalid_argument("build_feasible_set: combiner dimension mismatch");
  if (variant != ConditionVariant::kC3SvdRfOnly && variant != ConditionVariant::kC4ColNorm)
    throw std::invalid_argument("build_feasible_set: variant must be the RF-only or column-norm tier");
}

double plain_budget(const EtaConstants& eta, LinkMode link) {
  return link == LinkMode::kTxOnly ? std::min(eta.eta_lna, eta.eta_adc) : eta.eta_lna;
}

/// Per-beam scalar costs of the column-norm tier: cost[c] = sum_u of the
/// squared image norm of beam c (combiner-prefixed when w_rf is given).
std::vector<double> column_costs(const Codebook& codebook, const FreqChannel& si,
                                 const CMatrix* w_rf, OpCounter& counter) {
  const int c_count = codebook.num_beams();
  std::vector<double> cost(static_cast<size_t>(c_count), 0.0);
  for (const CMatrix& h : si.per_subcarrier) {
    CMatrix images = h * codebook.beams;
    if (w_rf) images = w_rf->adjoint() * images;
    for (int c = 0; c < c_count; ++c) cost[static_cast<size_t>(c)] += images.col(c).squaredNorm();
    counter.matvec_count += static_cast<std::uint64_t>(c_count) * (w_rf ? 2 : 1);
    counter.colnorm_count += static_cast<std::uint64_t>(c_count);
  }
  return cost;
}

}  // namespace

bool Allowlist::contains(int id) const {
  return std::binary_search(beam_ids.begin(), beam_ids.end(), id);
}

FeasibleSet build_feasible_set(const Codebook& codebook, const FreqChannel& si, int num_chains,
                               const EtaConstants& eta, ConditionVariant variant,
                               const CMatrix* w_rf, OpCounter& counter, LinkMode link) {
  validate_build_inputs(codebook, si, num_chains, variant, w_rf);
  const int c_count = codebook.num_beams();
  const int u_count = si.num_subcarriers();

  FeasibleSet fs;
  fs.variant = variant;
  fs.link = link;

  if (variant == ConditionVariant::kC4ColNorm) {
    const std::vector<double> cost = column_costs(codebook, si, nullptr, counter);
    std::vector<double> cost_adc;
    if (w_rf) cost_adc = column_costs(codebook, si, w_rf, counter);
    const double budget = w_rf ? eta.eta_lna : plain_budget(eta, link);

    for_each_combination(c_count, num_chains, [&](const std::vector<int>& idx) {
      double sum = 0.0;
      for (int i : idx) sum += cost[static_cast<size_t>(i)];
      bool feasible = sum <= budget;
      if (w_rf) {
        double sum_adc = 0.0;
        for (int i : idx) sum_adc += cost_adc[static_cast<size_t>(i)];
        feasible = feasible && sum_adc <= eta.eta_adc;
      }
      ++counter.combo_tests;
      if (feasible) {
        BeamCombo combo;
        combo.reserve(idx.size());
        for (int i : idx) combo.push_back(codebook.beam_ids[static_cast<size_t>(i)]);
        fs.combos.push_back(std::move(combo));
      }
    });
    return fs;
  }

  // Singular-value tier: precompute per-subcarrier Gram matrices of the beam
  // images so each combination reduces to the eigenvalue of an L x L block.
  std::vector<CMatrix> gram(static_cast<size_t>(u_count));
  std::vector<CMatrix> gram_adc;
  if (w_rf) gram_adc.resize(static_cast<size_t>(u_count));
  for (int u = 0; u < u_count; ++u) {
    const CMatrix images = si.per_subcarrier[static_cast<size_t>(u)] * codebook.beams;
    gram[static_cast<size_t>(u)] = images.adjoint() * images;
    if (w_rf) {
      const CMatrix prefixed = w_rf->adjoint() * images;
      gram_adc[static_cast<size_t>(u)] = prefixed.adjoint() * prefixed;
    }
  }
  const double budget = w_rf ? eta.eta_lna : plain_budget(eta, link);

  for_each_combination(c_count, num_chains, [&](const std::vector<int>& idx) {
    double lhs = 0.0;
    for (int u = 0; u < u_count; ++u) {
      lhs += lambda_max_submatrix(gram[static_cast<size_t>(u)], idx);
      ++counter.svd_count;
    }
    bool feasible = lhs <= budget;
    if (w_rf) {
      double lhs_adc = 0.0;
      for (int u = 0; u < u_count; ++u) {
        lhs_adc += lambda_max_submatrix(gram_adc[static_cast<size_t>(u)], idx);
        ++counter.svd_count;
      }
      feasible = feasible && lhs_adc <= eta.eta_adc;
    }
    ++counter.combo_tests;
    if (feasible) {
      BeamCombo combo;
      combo.reserve(idx.size());
      for (int i : idx) combo.push_back(codebook.beam_ids[static_cast<size_t>(i)]);
      fs.combos.push_back(std::move(combo));
    }
  });
  return fs;
}

FeasibleSet build_feasible_set_pruned(const Codebook& codebook, const FreqChannel& si,
                                      int num_chains, const EtaConstants& eta,
                                      ConditionVariant variant, const CMatrix* w_rf,
                                      OpCounter& counter, LinkMode link) {
  if (variant != ConditionVariant::kC4ColNorm)
    throw std::invalid_argument(
        "build_feasible_set_pruned: only the column-norm tier has additive costs");
  validate_build_inputs(codebook, si, num_chains, variant, w_rf);
  const int c_count = codebook.num_beams();

  const std::vector<double> cost = column_costs(codebook, si, nullptr, counter);
  std::vector<double> cost_adc;
  if (w_rf) cost_adc = column_costs(codebook, si, w_rf, counter);
  const double budget = w_rf ? eta.eta_lna : plain_budget(eta, link);

  // Ascending-cost order; ties resolved by beam index for determinism.
  std::vector<int> order(static_cast<size_t>(c_count));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ca = cost[static_cast<size_t>(a)];
    const double cb = cost[static_cast<size_t>(b)];
    return ca < cb || (ca == cb && a < b);
  });

  FeasibleSet fs;
  fs.variant = variant;
  fs.link = link;

  std::vector<int> prefix, sorted_idx;
  prefix.reserve(static_cast<size_t>(num_chains));
  auto descend = [&](auto&& self, int start, double partial) -> void {
    for (int j = start; j < c_count; ++j) {
      const double sum = partial + cost[static_cast<size_t>(order[static_cast<size_t>(j)])];
      if (sum > budget) break;  // costs ascend: the whole suffix fails too
      prefix.push_back(order[static_cast<size_t>(j)]);
      if (static_cast<int>(prefix.size()) == num_chains) {
        // Full evaluation in ascending index order, matching the plain
        // builder's summation exactly.
        sorted_idx = prefix;
        std::sort(sorted_idx.begin(), sorted_idx.end());
        double exact = 0.0;
        for (int i : sorted_idx) exact += cost[static_cast<size_t>(i)];
        ++counter.combo_tests;
        bool feasible = exact <= budget;
        if (feasible && w_rf) {
          double sum_adc = 0.0;
          for (int i : sorted_idx) sum_adc += cost_adc[static_cast<size_t>(i)];
          feasible = sum_adc <= eta.eta_adc;
        }
        if (feasible) {
          BeamCombo combo;
          combo.reserve(sorted_idx.size());
          for (int i : sorted_idx) combo.push_back(codebook.beam_ids[static_cast<size_t>(i)]);
          fs.combos.push_back(std::move(combo));
        }
      } else {
        self(self, j + 1, sum);
      }
      prefix.pop_back();
    }
  };
  descend(descend, 0, 0.0);

  std::sort(fs.combos.begin(), fs.combos.end());
  return fs;
}

FeasibleSet all_combinations(const Codebook& codebook, int num_chains) {
  if (codebook.num_beams() < 1) throw std::invalid_argument("all_combinations: empty codebook");
  if (num_chains < 1 || num_chains > codebook.num_beams())
    throw std::invalid_argument("all_combinations: num_chains must be in [1, C]");
  FeasibleSet fs;
  fs.variant = ConditionVariant::kC4ColNorm;
  for_each_combination(codebook.num_beams(), num_chains, [&](const std::vector<int>& idx) {
    BeamCombo combo;
    combo.reserve(idx.size());
    for (int i : idx) combo.push_back(codebook.beam_ids[static_cast<size_t>(i)]);
    fs.combos.push_back(std::move(combo));
  });
  return fs;
}

Allowlist extract_allowlist(const FeasibleSet& fs, const Codebook& codebook) {
  std::vector<int> ids;
  for (const BeamCombo& combo : fs.combos)
    for (int id : combo) {
      if (id < 1 || id > codebook.num_beams())
        throw std::invalid_argument("extract_allowlist: combo references unknown beam id");
      ids.push_back(id);
    }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return Allowlist{std::move(ids)};
}

FeasibleSet restrain_rx_link(const CMatrix& f_rf, const Codebook& codebook_rx,
                             const FreqChannel& si, double eta_adc, ConditionVariant variant,
                             OpCounter& counter) {
  if (codebook_rx.num_beams() < 1) throw std::invalid_argument("restrain_rx_link: empty codebook");
  if (si.per_subcarrier.empty())
    throw std::invalid_argument("restrain_rx_link: empty interference channel");
  if (si.cols() != f_rf.rows() || si.rows() != codebook_rx.beam_length())
    throw std::invalid_argument("restrain_rx_link: dimension mismatch");
  if (variant != ConditionVariant::kC3SvdRfOnly && variant != ConditionVariant::kC4ColNorm)
    throw std::invalid_argument("restrain_rx_link: variant must be the RF-only or column-norm tier");

  const int c_count = codebook_rx.num_beams();
  const int u_count = si.num_subcarriers();
  // One receive chain per combiner column; mirror the transmit chain count.
  const int num_chains = static_cast<int>(f_rf.cols());
  if (num_chains < 1 || num_chains > c_count)
    throw std::invalid_argument("restrain_rx_link: chain count must be in [1, C]");

  FeasibleSet fs;
  fs.variant = variant;
  fs.link = LinkMode::kTxThenRx;

  if (variant == ConditionVariant::kC4ColNorm) {
    // Additive per-receive-beam costs, as on the transmit side.
    std::vector<double> cost(static_cast<size_t>(c_count), 0.0);
    for (const CMatrix& h : si.per_subcarrier) {
      const CMatrix image = h * f_rf;                             // per-chain interference
      const CMatrix projected = codebook_rx.beams.adjoint() * image;  // C_r x L_t
      for (int c = 0; c < c_count; ++c) cost[static_cast<size_t>(c)] += projected.row(c).squaredNorm();
      counter.matvec_count += static_cast<std::uint64_t>(f_rf.cols() + c_count);
      counter.colnorm_count += static_cast<std::uint64_t>(c_count);
    }
    for_each_combination(c_count, num_chains, [&](const std::vector<int>& idx) {
      double sum = 0.0;
      for (int i : idx) sum += cost[static_cast<size_t>(i)];
      ++counter.combo_tests;
      if (sum <= eta_adc) {
        BeamCombo combo;
        for (int i : idx) combo.push_back(codebook_rx.beam_ids[static_cast<size_t>(i)]);
        fs.combos.push_back(std::move(combo));
      }
    });
    return fs;
  }

  // Singular-value tier: sigma_max^2(W* H[u] F) is the top eigenvalue of the
  // combo block of (beams* Y)(beams* Y)* with Y = H[u] F.
  std::vector<CMatrix> row_gram(static_cast<size_t>(u_count));
  for (int u = 0; u < u_count; ++u) {
    const CMatrix projected = codebook_rx.beams.adjoint() * (si.per_subcarrier[static_cast<size_t>(u)] * f_rf);
    row_gram[static_cast<size_t>(u)] = projected * projected.adjoint();
  }
  for_each_combination(c_count, num_chains, [&](const std::vector<int>& idx) {
    double lhs = 0.0;
    for (int u = 0; u < u_count; ++u) {
      lhs += lambda_max_submatrix(row_gram[static_cast<size_t>(u)], idx);
      ++counter.svd_count;
    }
    ++counter.combo_tests;
    if (lhs <= eta_adc) {
      BeamCombo combo;
      for (int i : idx) combo.push_back(codebook_rx.beam_ids[static_cast<size_t>(i)]);
      fs.combos.push_back(std::move(combo));
    }
  });
  return fs;
}

bool recheck_combo(const BeamCombo& combo, const Codebook& codebook, const FreqChannel& si,
                   const EtaConstants& eta, ConditionVariant variant, const CMatrix* w_rf,
                   LinkMode link) {
  CMatrix f_rf(codebook.beam_length(), static_cast<Eigen::Index>(combo.size()));
  for (size_t i = 0; i < combo.size(); ++i) f_rf.col(static_cast<Eigen::Index>(i)) = codebook.beam(combo[i]);

  EtaConstants effective = eta;
  if (!w_rf) {
    const double budget = plain_budget(eta, link);
    effective.eta_lna = budget;
    effective.eta_adc = budget;
  }
  const auto check = [&](const CMatrix* w) {
    return variant == ConditionVariant::kC4ColNorm ? check_c4(si, f_rf, w, effective)
                                                   : check_c3(si, f_rf, w, effective);
  };
  bool pass = check(nullptr).pass;
  if (w_rf) pass = pass && check(w_rf).pass;
  return pass;
}

MeasurementCount measurement_count(int allowlist_size, int c_r_desired, int c_t_full, int c_r_own,
                                   int c_t_peer) {
  if (allowlist_size < 0 || c_r_desired < 0 || c_t_full < 0 || c_r_own < 0 || c_t_peer < 0)
    throw std::invalid_argument("measurement_count: sizes must be non-negative");
  MeasurementCount m;
  m.tx_link = static_cast<long>(c_r_desired) * allowlist_size;
  m.tx_baseline = static_cast<long>(c_r_desired) * c_t_full;
  m.rx_link = static_cast<long>(c_r_own) * c_t_peer;
  m.total = m.tx_link + m.rx_link;
  return m;
}

std::uint64_t binomial(int c, int l) {
  if (l < 0 || l > c) return 0;
  l = std::min(l, c - l);
  std::uint64_t result = 1;
  for (int i = 1; i <= l; ++i) {
    result = result * static_cast<std::uint64_t>(c - l + i) / static_cast<std::uint64_t>(i);
  }
  return result;
}

}  // namespace fdbeam
