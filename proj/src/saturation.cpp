#include "fdbeam/saturation.hpp"

#include <cmath>

namespace fdbeam {

SaturationThresholds SaturationThresholds::from_adc_bits(double p_lna_max_dbm, int bits,
                                                         double noise_floor_dbm,
                                                         double papr_margin_db) {
  if (bits < 1) throw std::invalid_argument("SaturationThresholds: adc_bits must be positive");
  SaturationThresholds t;
  t.p_lna_max_dbm = p_lna_max_dbm;
  t.adc_bits = bits;
  t.noise_floor_dbm = noise_floor_dbm;
  t.papr_margin_db = papr_margin_db;
  t.p_adc_max_dbm = adc_cap_dbm(bits, noise_floor_dbm, papr_margin_db);
  return t;
}

EtaConstants derive_eta(const SaturationThresholds& thresholds, int num_subcarriers,
                        double p_tx_dbm, double g_sq_si_db) {
  if (num_subcarriers < 1) throw std::invalid_argument("derive_eta: num_subcarriers must be >= 1");
  if (!std::isfinite(thresholds.p_lna_max_dbm) || !std::isfinite(thresholds.p_adc_max_dbm) ||
      !std::isfinite(p_tx_dbm) || !std::isfinite(g_sq_si_db))
    throw std::invalid_argument("derive_eta: non-finite dB quantity");

  const double p_tx = db_to_linear(p_tx_dbm);
  const double g_sq = db_to_linear(g_sq_si_db);
  if (!(p_tx > 0.0) || !(g_sq > 0.0))
    throw std::invalid_argument("derive_eta: non-positive linear transmit power or path gain");

  EtaConstants eta;
  eta.eta_lna = num_subcarriers * db_to_linear(thresholds.p_lna_max_dbm) / (p_tx * g_sq);
  eta.eta_adc = num_subcarriers * db_to_linear(thresholds.p_adc_max_dbm) / (p_tx * g_sq);
  return eta;
}

namespace {

double lambda_max_hermitian(const CMatrix& g) {
  const int n = static_cast<int>(g.rows());
  if (n == 1) return g(0, 0).real();
  if (n == 2) {
    const double a = g(0, 0).real();
    const double c = g(1, 1).real();
    const double half_diff = 0.5 * (a - c);
    return 0.5 * (a + c) + std::sqrt(half_diff * half_diff + std::norm(g(0, 1)));
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(g, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

void require_channel(const FreqChannel& si) {
  if (si.per_subcarrier.empty()) throw std::invalid_argument("empty frequency channel");
}

}  // namespace

double sigma_max_sq(const CMatrix& m, OpCounter* counter) {
  if (counter) ++counter->svd_count;
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  if (m.cols() <= m.rows()) return lambda_max_hermitian(m.adjoint() * m);
  return lambda_max_hermitian(m * m.adjoint());
}

ElementCheck check_c1(const FreqChannel& si, const CMatrix& f_rf,
                      const std::vector<CMatrix>& f_bb_per_u, const CMatrix* w_rf,
                      const EtaConstants& eta, int n_s, OpCounter* counter) {
  require_channel(si);
  const int u_count = si.num_subcarriers();
  if (static_cast<int>(f_bb_per_u.size()) != u_count)
    throw std::invalid_argument("check_c1: need one digital precoder per subcarrier");
  if (si.cols() != f_rf.rows()) throw std::invalid_argument("check_c1: dimension mismatch");
  if (w_rf && w_rf->rows() != si.rows())
    throw std::invalid_argument("check_c1: combiner dimension mismatch");

  const int n_elem = w_rf ? static_cast<int>(w_rf->cols()) : si.rows();
  RVector achieved = RVector::Zero(n_elem);
  for (int u = 0; u < u_count; ++u) {
    if (f_bb_per_u[static_cast<size_t>(u)].rows() != f_rf.cols())
      throw std::invalid_argument("check_c1: digital precoder dimension mismatch");
    const CMatrix stack = f_rf * f_bb_per_u[static_cast<size_t>(u)];
    CMatrix m = si.per_subcarrier[static_cast<size_t>(u)] * stack;
    if (w_rf) m = w_rf->adjoint() * m;
    achieved += m.rowwise().squaredNorm();
    if (counter) {
      counter->matvec_count += static_cast<std::uint64_t>(m.cols()) * (w_rf ? 2 : 1);
      counter->colnorm_count += static_cast<std::uint64_t>(n_elem);
    }
  }

  const double threshold = n_s * (w_rf ? eta.eta_adc : eta.eta_lna);
  ElementCheck result;
  result.threshold = threshold;
  result.achieved = achieved;
  result.margins = RVector::Constant(n_elem, threshold) - achieved;
  result.pass = (result.margins.array() >= 0.0).all();
  return result;
}

ScalarCheck check_c2(const FreqChannel& si, const CMatrix& f_rf,
                     const std::vector<CMatrix>& f_bb_per_u, const CMatrix* w_rf,
                     const EtaConstants& eta, int n_s, OpCounter* counter) {
  require_channel(si);
  const int u_count = si.num_subcarriers();
  if (static_cast<int>(f_bb_per_u.size()) != u_count)
    throw std::invalid_argument("check_c2: need one digital precoder per subcarrier");
  if (si.cols() != f_rf.rows()) throw std::invalid_argument("check_c2: dimension mismatch");

  double lhs = 0.0;
  for (int u = 0; u < u_count; ++u) {
    const CMatrix stack = f_rf * f_bb_per_u[static_cast<size_t>(u)];
    CMatrix m = si.per_subcarrier[static_cast<size_t>(u)] * stack;
    if (w_rf) m = w_rf->adjoint() * m;
    lhs += sigma_max_sq(m, counter);
  }

  ScalarCheck result;
  result.lhs = lhs;
  result.margin = n_s * (w_rf ? eta.eta_adc : eta.eta_lna) - lhs;
  result.pass = result.margin >= 0.0;
  return result;
}

ScalarCheck check_c3(const FreqChannel& si, const CMatrix& f_rf, const CMatrix* w_rf,
                     const EtaConstants& eta, OpCounter* counter) {
  require_channel(si);
  if (si.cols() != f_rf.rows()) throw std::invalid_argument("check_c3: dimension mismatch");

  double lhs = 0.0;
  for (const CMatrix& h : si.per_subcarrier) {
    CMatrix m = h * f_rf;
    if (w_rf) m = w_rf->adjoint() * m;
    lhs += sigma_max_sq(m, counter);
  }

  ScalarCheck result;
  result.lhs = lhs;
  result.margin = (w_rf ? eta.eta_adc : eta.eta_lna) - lhs;
  result.pass = result.margin >= 0.0;
  return result;
}

ScalarCheck check_c4(const FreqChannel& si, const CMatrix& f_rf, const CMatrix* w_rf,
                     const EtaConstants& eta, OpCounter* counter) {
  require_channel(si);
  if (si.cols() != f_rf.rows()) throw std::invalid_argument("check_c4: dimension mismatch");

  double lhs = 0.0;
  for (const CMatrix& h : si.per_subcarrier) {
    for (int l = 0; l < f_rf.cols(); ++l) {
      CVector image = h * f_rf.col(l);
      if (w_rf) image = w_rf->adjoint() * image;
      lhs += image.squaredNorm();
      if (counter) {
        counter->matvec_count += w_rf ? 2 : 1;
        ++counter->colnorm_count;
      }
    }
  }

  ScalarCheck result;
  result.lhs = lhs;
  result.margin = (w_rf ? eta.eta_adc : eta.eta_lna) - lhs;
  result.pass = result.margin >= 0.0;
  return result;
}

TierGap theorem1_gap(const FreqChannel& si, const CMatrix& f_rf, const CMatrix* w_rf,
                     OpCounter* counter) {
  // Thresholds are irrelevant here; reuse the kernels for their left-hand sides.
  const EtaConstants dummy{0.0, 0.0};
  TierGap gap;
  gap.c3_lhs = check_c3(si, f_rf, w_rf, dummy, counter).lhs;
  gap.c4_lhs = check_c4(si, f_rf, w_rf, dummy, counter).lhs;
  return gap;
}

}  // namespace fdbeam
