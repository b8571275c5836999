#pragma once

#include <optional>

#include "fdbeam/opcount.hpp"
#include "fdbeam/types.hpp"

namespace fdbeam {

/// Receive-chain power caps. The ADC cap can either be given directly or be
/// derived from the converter resolution: a B-bit ADC tolerates
/// noise_floor + 6.021*B + 1.763 - papr_margin dBm at its input.
struct SaturationThresholds {
  double p_lna_max_dbm = -10.0;
  double p_adc_max_dbm = -25.985;
  std::optional<int> adc_bits;
  double noise_floor_dbm = -90.0;
  double papr_margin_db = 10.0;

  static double adc_cap_dbm(int bits, double noise_floor_dbm, double papr_margin_db) {
    return noise_floor_dbm + 6.021 * bits + 1.763 - papr_margin_db;
  }

  /// Thresholds with the ADC cap derived from a bit width.
  static SaturationThresholds from_adc_bits(double p_lna_max_dbm, int bits,
                                            double noise_floor_dbm, double papr_margin_db);
};

/// Normalized interference budgets: eta = U * P_cap / (P_tx * G_si^2), all in
/// linear units. Every constraint kernel below compares against these.
struct EtaConstants {
  double eta_lna = 0.0;
  double eta_adc = 0.0;
};

/// The four tiers of the saturation-condition chain, from the exact
/// per-element form to the cheapest column-norm relaxation. Each tier is
/// sufficient for the one before it.
enum class ConditionVariant {
  kC1Exact,
  kC2SvdWithBb,
  kC3SvdRfOnly,
  kC4ColNorm,
};

EtaConstants derive_eta(const SaturationThresholds& thresholds, int num_subcarriers,
                        double p_tx_dbm, double g_sq_si_db);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Largest squared singular value, evaluated through the Gram matrix of the
/// smaller side. Counted as one unit on the svd tally.
double sigma_max_sq(const CMatrix& m, OpCounter* counter = nullptr);

/// Result of a per-element constraint check: the margin vector holds
/// threshold - achieved for each rx antenna (LNA form) or rx chain (ADC form).
struct ElementCheck {
  bool pass = false;
  RVector margins;
  RVector achieved;
  double threshold = 0.0;
};

/// Result of a scalar constraint check.
struct ScalarCheck {
  bool pass = false;
  double margin = 0.0;
  double lhs = 0.0;
};

/// Tier 1, exact per-element powers. Without a combiner this is the per-LNA
/// test: sum_u diag(H[u] F Fbb[u] Fbb[u]* F* H[u]*) <= n_s * eta_lna per rx
/// antenna. With a combiner the diagonal is taken after W* and compared
/// against n_s * eta_adc per rx chain.
ElementCheck check_c1(const FreqChannel& si, const CMatrix& f_rf,
                      const std::vector<CMatrix>& f_bb_per_u, const CMatrix* w_rf,
                      const EtaConstants& eta, int n_s, OpCounter* counter = nullptr);

/// Tier 2: sum_u sigma_max^2(H[u] F Fbb[u]) <= n_s * eta (combiner-prefixed
/// for the ADC form).
ScalarCheck check_c2(const FreqChannel& si, const CMatrix& f_rf,
                     const std::vector<CMatrix>& f_bb_per_u, const CMatrix* w_rf,
                     const EtaConstants& eta, int n_s, OpCounter* counter = nullptr);

/// Tier 3, digital-precoder-free: sum_u sigma_max^2(H[u] F) <= eta.
ScalarCheck check_c3(const FreqChannel& si, const CMatrix& f_rf, const CMatrix* w_rf,
                     const EtaConstants& eta, OpCounter* counter = nullptr);

/// Tier 4, column norms only: sum_l sum_u ||H[u] f_l||^2 <= eta. Performs no
/// singular-value evaluation.
ScalarCheck check_c4(const FreqChannel& si, const CMatrix& f_rf, const CMatrix* w_rf,
                     const EtaConstants& eta, OpCounter* counter = nullptr);

/// Both relaxation left-hand sides for the same inputs, for tightness
/// diagnostics: the column-norm sum always dominates the singular-value sum.
struct TierGap {
  double c3_lhs = 0.0;
  double c4_lhs = 0.0;
};

TierGap theorem1_gap(const FreqChannel& si, const CMatrix& f_rf, const CMatrix* w_rf,
                     OpCounter* counter = nullptr);

}  // namespace fdbeam
