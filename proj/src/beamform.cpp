#include "fdbeam/beamform.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fdbeam {

namespace {

MeasurementTable sweep_impl(const Codebook& tx_beams, const CMatrix& tx_cols,
                            std::vector<int> tx_ids, const Codebook& rx_beams,
                            const FreqChannel& chan) {
  if (chan.per_subcarrier.empty()) throw std::invalid_argument("beam_sweep: empty channel");
  if (chan.cols() != tx_beams.beam_length() || chan.rows() != rx_beams.beam_length())
    throw std::invalid_argument("beam_sweep: channel/codebook dimension mismatch");

  MeasurementTable table;
  table.tx_ids = std::move(tx_ids);
  table.rx_ids = rx_beams.beam_ids;
  table.rss = RMatrix::Zero(rx_beams.num_beams(), tx_cols.cols());
  for (const CMatrix& h : chan.per_subcarrier) {
    const CMatrix projected = rx_beams.beams.adjoint() * (h * tx_cols);
    table.rss += projected.cwiseAbs2();
  }
  table.measurements = static_cast<long>(table.rss.rows()) * table.rss.cols();
  return table;
}

}  // namespace

MeasurementTable beam_sweep(const Codebook& tx_beams, const Codebook& rx_beams,
                            const FreqChannel& chan) {
  return sweep_impl(tx_beams, tx_beams.beams, tx_beams.beam_ids, rx_beams, chan);
}

MeasurementTable beam_sweep(const Codebook& tx_beams, const std::vector<int>& tx_subset,
                            const Codebook& rx_beams, const FreqChannel& chan) {
  CMatrix cols(tx_beams.beam_length(), static_cast<Eigen::Index>(tx_subset.size()));
  for (size_t i = 0; i < tx_subset.size(); ++i)
    cols.col(static_cast<Eigen::Index>(i)) = tx_beams.beam(tx_subset[i]);
  return sweep_impl(tx_beams, cols, tx_subset, rx_beams, chan);
}

namespace {

/// Exact max-weight assignment of the combo's beams onto distinct rx rows,
/// via a suffix DP over rx rows and matched-position subsets. Also
/// reconstructs the lexicographically smallest optimal rx set; all tie
/// comparisons reuse stored DP values so they are exact.
struct AssignmentSolver {
  const RMatrix& rss;  // rx rows x tx columns of the sweep table
  int num_rx;

  explicit AssignmentSolver(const RMatrix& rss_) : rss(rss_), num_rx(static_cast<int>(rss_.rows())) {}

  // weights(position) = table column index for that combo position
  double solve(const std::vector<int>& tx_cols, std::vector<int>* rx_rows_out) const {
    const int l = static_cast<int>(tx_cols.size());
    const int full = (1 << l) - 1;
    // suffix[r][S]: best value matching positions in S using rx rows >= r.
    std::vector<std::vector<double>> suffix(static_cast<size_t>(num_rx + 1));
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    suffix[static_cast<size_t>(num_rx)].assign(static_cast<size_t>(full + 1), kNegInf);
    suffix[static_cast<size_t>(num_rx)][0] = 0.0;
    for (int r = num_rx - 1; r >= 0; --r) {
      auto& cur = suffix[static_cast<size_t>(r)];
      const auto& next = suffix[static_cast<size_t>(r + 1)];
      cur = next;
      for (int s = 1; s <= full; ++s) {
        double best = next[static_cast<size_t>(s)];
        for (int i = 0; i < l; ++i) {
          if (!(s & (1 << i))) continue;
          const double prev = next[static_cast<size_t>(s ^ (1 << i))];
          if (prev == kNegInf) continue;
          best = std::max(best, prev + rss(r, tx_cols[static_cast<size_t>(i)]));
        }
        cur[static_cast<size_t>(s)] = best;
      }
    }
    const double value = suffix[0][static_cast<size_t>(full)];
    if (rx_rows_out) {
      rx_rows_out->clear();
      int s = full;
      double need = value;
      for (int r = 0; r < num_rx && s != 0; ++r) {
        const auto& next = suffix[static_cast<size_t>(r + 1)];
        bool used = false;
        for (int i = 0; i < l && !used; ++i) {
          if (!(s & (1 << i))) continue;
          const double prev = next[static_cast<size_t>(s ^ (1 << i))];
          if (prev != -std::numeric_limits<double>::infinity() &&
              prev + rss(r, tx_cols[static_cast<size_t>(i)]) == need) {
            rx_rows_out->push_back(r);
            s ^= (1 << i);
            need = prev;
            used = true;
          }
        }
      }
    }
    return value;
  }
};

}  // namespace

std::optional<RfSelection> select_rf(const FeasibleSet& fs, const MeasurementTable& table,
                                     int l_r) {
  if (fs.empty()) return std::nullopt;
  if (l_r < 1 || l_r > static_cast<int>(table.rx_ids.size()))
    throw std::invalid_argument("select_rf: l_r must be in [1, |rx codebook|]");

  // Map beam ids to table columns once.
  std::vector<int> col_of;
  {
    int max_id = 0;
    for (int id : table.tx_ids) max_id = std::max(max_id, id);
    col_of.assign(static_cast<size_t>(max_id + 1), -1);
    for (size_t c = 0; c < table.tx_ids.size(); ++c)
      col_of[static_cast<size_t>(table.tx_ids[c])] = static_cast<int>(c);
  }

  const AssignmentSolver solver(table.rss);
  const int l_t_any = static_cast<int>(fs.combos.front().size());
  if (l_r < l_t_any)
    throw std::invalid_argument("select_rf: fewer rx chains than combo beams is unsupported");

  RfSelection best;
  bool have = false;
  std::vector<int> tx_cols, rx_rows;
  for (const BeamCombo& combo : fs.combos) {
    tx_cols.clear();
    for (int id : combo) {
      if (id <= 0 || id >= static_cast<int>(col_of.size()) || col_of[static_cast<size_t>(id)] < 0)
        throw std::invalid_argument("select_rf: combo beam missing from the sweep table");
      tx_cols.push_back(col_of[static_cast<size_t>(id)]);
    }
    const double score = solver.solve(tx_cols, nullptr);
    if (!have || score > best.score) {
      solver.solve(tx_cols, &rx_rows);
      best.tx_combo = combo;
      best.score = score;
      best.rx_combo.clear();
      for (int r : rx_rows) best.rx_combo.push_back(table.rx_ids[static_cast<size_t>(r)]);
      std::sort(best.rx_combo.begin(), best.rx_combo.end());
      // Pad with the smallest unused rx ids when more chains than combo beams.
      for (int id : table.rx_ids) {
        if (static_cast<int>(best.rx_combo.size()) >= l_r) break;
        if (!std::binary_search(best.rx_combo.begin(), best.rx_combo.end(), id)) {
          best.rx_combo.insert(
              std::upper_bound(best.rx_combo.begin(), best.rx_combo.end(), id), id);
        }
      }
      have = true;
    }
  }
  return best;
}

CMatrix beams_from_combo(const Codebook& codebook, const BeamCombo& combo) {
  CMatrix m(codebook.beam_length(), static_cast<Eigen::Index>(combo.size()));
  for (size_t i = 0; i < combo.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = codebook.beam(combo[i]);
  return m;
}

FreqChannel effective_channel(const FreqChannel& chan, const CMatrix& f_rf, const CMatrix& w_rf) {
  if (chan.per_subcarrier.empty()) throw std::invalid_argument("effective_channel: empty channel");
  if (chan.cols() != f_rf.rows() || chan.rows() != w_rf.rows())
    throw std::invalid_argument("effective_channel: dimension mismatch");
  FreqChannel eff;
  eff.per_subcarrier.reserve(chan.per_subcarrier.size());
  for (const CMatrix& h : chan.per_subcarrier)
    eff.per_subcarrier.push_back(w_rf.adjoint() * h * f_rf);
  return eff;
}

namespace {

void fix_column_phases(CMatrix& m) {
  for (int c = 0; c < m.cols(); ++c) {
    int arg_max = 0;
    double best = -1.0;
    for (int r = 0; r < m.rows(); ++r) {
      const double mag = std::abs(m(r, c));
      if (mag > best) {
        best = mag;
        arg_max = r;
      }
    }
    if (best > 0.0) {
      const Complex rotation = std::conj(m(arg_max, c)) / std::abs(m(arg_max, c));
      m.col(c) *= rotation;
    }
  }
}

}  // namespace

DigitalBeamformers eigen_bb(const FreqChannel& eff, int n_s) {
  if (eff.per_subcarrier.empty()) throw std::invalid_argument("eigen_bb: empty channel");
  if (n_s < 1 || n_s > std::min(eff.rows(), eff.cols()))
    throw std::invalid_argument("eigen_bb: n_s must be in [1, min(L_r, L_t)]");

  DigitalBeamformers bf;
  bf.f_bb_per_u.reserve(eff.per_subcarrier.size());
  bf.w_bb_per_u.reserve(eff.per_subcarrier.size());
  for (const CMatrix& h : eff.per_subcarrier) {
    if (!h.allFinite()) throw std::invalid_argument("eigen_bb: non-finite effective channel");
    Eigen::JacobiSVD<CMatrix> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
    CMatrix w = svd.matrixU().leftCols(n_s);
    CMatrix f = svd.matrixV().leftCols(n_s);
    fix_column_phases(w);
    fix_column_phases(f);
    const double norm = f.norm();
    if (norm > 0.0) f *= std::sqrt(static_cast<double>(n_s)) / norm;
    bf.w_bb_per_u.push_back(std::move(w));
    bf.f_bb_per_u.push_back(std::move(f));
  }
  return bf;
}

ResidualSi digital_sic(const FreqChannel& eff_si, const std::vector<CMatrix>& f_bb_tx_per_u,
                       const std::vector<CMatrix>& w_bb_rx_per_u, double snr_si_linear, int n_s,
                       bool saturation_ok, bool ideal_benchmark) {
  const size_t u_count = eff_si.per_subcarrier.size();
  if (f_bb_tx_per_u.size() != u_count || w_bb_rx_per_u.size() != u_count)
    throw std::invalid_argument("digital_sic: need one digital beamformer per subcarrier");

  ResidualSi residual;
  residual.cancelled = ideal_benchmark || saturation_ok;
  residual.covariance.reserve(u_count);
  residual.power.reserve(u_count);
  for (size_t u = 0; u < u_count; ++u) {
    const int dim = static_cast<int>(w_bb_rx_per_u[u].cols());
    if (residual.cancelled) {
      residual.covariance.push_back(CMatrix::Zero(dim, dim));
      residual.power.push_back(0.0);
    } else {
      const CMatrix m = w_bb_rx_per_u[u].adjoint() * eff_si.per_subcarrier[u] * f_bb_tx_per_u[u];
      CMatrix cov = (snr_si_linear / n_s) * (m * m.adjoint());
      residual.power.push_back(cov.trace().real());
      residual.covariance.push_back(std::move(cov));
    }
  }
  return residual;
}

double power_reduction_baseline(const FreqChannel& si, const CMatrix& f_rf,
                                const std::vector<CMatrix>& f_bb_per_u, const CMatrix& w_rf,
                                const EtaConstants& eta, int n_s) {
  double beta = 1.0;
  const auto apply = [&](const CMatrix* w) {
    const ElementCheck check = check_c1(si, f_rf, f_bb_per_u, w, eta, n_s);
    for (int i = 0; i < check.achieved.size(); ++i) {
      if (check.achieved(i) > check.threshold)
        beta = std::min(beta, check.threshold / check.achieved(i));
    }
  };
  apply(nullptr);
  apply(&w_rf);
  return beta;
}

}  // namespace fdbeam
