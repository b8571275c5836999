#pragma once

#include <optional>

#include "fdbeam/allowlist.hpp"
#include "fdbeam/codebook.hpp"
#include "fdbeam/saturation.hpp"
#include "fdbeam/types.hpp"

namespace fdbeam {

/// Received-signal-strength table from a pairwise beam sweep:
/// rss(r, t) = sum_u |w_r* H[u] f_t|^2 for rx beam id rx_ids[r] and tx beam
/// id tx_ids[t].
struct MeasurementTable {
  RMatrix rss;
  std::vector<int> rx_ids;
  std::vector<int> tx_ids;
  long measurements = 0;  // |rx| * |tx|
};

/// Full analog + per-subcarrier digital beamformer pair for one link.
struct HybridBeamformer {
  CMatrix f_rf;
  CMatrix w_rf;
  std::vector<CMatrix> f_bb_per_u;
  std::vector<CMatrix> w_bb_per_u;
};

MeasurementTable beam_sweep(const Codebook& tx_beams, const Codebook& rx_beams,
                            const FreqChannel& chan);

/// Sweep restricted to a subset of transmit beams (the reduced-codebook
/// case); tx_subset holds 1-based beam ids into tx_beams.
MeasurementTable beam_sweep(const Codebook& tx_beams, const std::vector<int>& tx_subset,
                            const Codebook& rx_beams, const FreqChannel& chan);

struct RfSelection {
  BeamCombo tx_combo;
  BeamCombo rx_combo;
  double score = 0.0;
};

/// Pick the feasible transmit combination and any l_r distinct receive beams
/// maximizing the summed best-assignment of measured strengths between the
/// combination's beams and the chosen receive beams. Ties fall to the
/// lexicographically smallest (tx_combo, rx_combo). Returns nullopt when the
/// feasible set is empty.
std::optional<RfSelection> select_rf(const FeasibleSet& fs, const MeasurementTable& table,
                                     int l_r);

CMatrix beams_from_combo(const Codebook& codebook, const BeamCombo& combo);

/// Channel seen by the digital stage: w_rf* H[u] f_rf per subcarrier.
FreqChannel effective_channel(const FreqChannel& chan, const CMatrix& f_rf, const CMatrix& w_rf);

struct DigitalBeamformers {
  std::vector<CMatrix> f_bb_per_u;
  std::vector<CMatrix> w_bb_per_u;
};

/// Per-subcarrier eigenbeamforming: the digital combiner and precoder take
/// the leading n_s left/right singular vectors of the effective channel. The
/// precoder is rescaled so its squared Frobenius norm is exactly n_s and
/// each factor column's largest entry is rotated real-positive for
/// reproducible output.
DigitalBeamformers eigen_bb(const FreqChannel& eff, int n_s);

struct ResidualSi {
  std::vector<CMatrix> covariance;  // per subcarrier, noise-normalized
  std::vector<double> power;        // trace of the above
  bool cancelled = true;
};

/// Baseband cancellation model: once the receive chain stays linear the
/// reconstructed interference is subtracted perfectly, leaving zero
/// residual. A saturated chain invalidates reconstruction and the full
/// interference covariance passes through. Benchmark mode cancels
/// unconditionally.
ResidualSi digital_sic(const FreqChannel& eff_si, const std::vector<CMatrix>& f_bb_tx_per_u,
                       const std::vector<CMatrix>& w_bb_rx_per_u, double snr_si_linear, int n_s,
                       bool saturation_ok, bool ideal_benchmark = false);

/// Largest transmit-power scale in (0, 1] under which the exact per-antenna
/// and per-chain power caps hold for an already-selected beamformer. Both
/// left-hand sides scale linearly with transmit power, so the factor is the
/// worst threshold/achieved ratio, capped at 1.
double power_reduction_baseline(const FreqChannel& si, const CMatrix& f_rf,
                                const std::vector<CMatrix>& f_bb_per_u, const CMatrix& w_rf,
                                const EtaConstants& eta, int n_s);

}  // namespace fdbeam
