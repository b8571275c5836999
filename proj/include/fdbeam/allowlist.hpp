#pragma once

#include "fdbeam/codebook.hpp"
#include "fdbeam/opcount.hpp"
#include "fdbeam/saturation.hpp"
#include "fdbeam/types.hpp"

namespace fdbeam {

/// A combination of distinct beams forming one analog beamformer, stored as
/// strictly increasing 1-based beam ids (column order never affects any
/// constraint, so the sorted tuple is the canonical form).
using BeamCombo = std::vector<int>;

/// Which links the saturation conditions restrain during construction.
/// kTxOnly guards both the per-antenna and the per-chain budget with the
/// transmit-side beams alone: for combining matrices with orthonormal
/// columns the combiner-prefixed left-hand side never exceeds the plain one,
/// so testing against min(eta_lna, eta_adc) covers both conditions for any
/// later combiner choice. kTxThenRx restrains the transmit link with the
/// per-antenna budget only and leaves the per-chain budget to
/// restrain_rx_link once the precoder is fixed.
enum class LinkMode { kTxOnly, kTxThenRx };

struct FeasibleSet {
  std::vector<BeamCombo> combos;  // lexicographically sorted
  ConditionVariant variant = ConditionVariant::kC4ColNorm;
  LinkMode link = LinkMode::kTxOnly;

  bool empty() const { return combos.empty(); }
  size_t size() const { return combos.size(); }
};

/// The reduced beam codebook induced by a feasible set: the sorted union of
/// all beam ids that appear in at least one feasible combination.
struct Allowlist {
  std::vector<int> beam_ids;

  int size() const { return static_cast<int>(beam_ids.size()); }
  bool contains(int id) const;
};

/// Enumerate every C-choose-L beam combination and keep those satisfying the
/// selected condition tier for the given interference channel.
///
/// Cost structure, tallied on the counter: the singular-value tier evaluates
/// one sigma_max^2 per (subcarrier, combination); the column-norm tier
/// evaluates one image norm per (subcarrier, beam) up front and then tests
/// each combination by summing scalars. With a combiner supplied, both the
/// plain and the combiner-prefixed condition must hold and the per-condition
/// costs double.
FeasibleSet build_feasible_set(const Codebook& codebook, const FreqChannel& si, int num_chains,
                               const EtaConstants& eta, ConditionVariant variant,
                               const CMatrix* w_rf, OpCounter& counter,
                               LinkMode link = LinkMode::kTxOnly);

/// Column-norm-tier construction that skips provably infeasible chunks:
/// beams are sorted by ascending scalar cost, combinations are enumerated in
/// that order, and any prefix whose budget is already exceeded cuts off the
/// entire ascending suffix. Returns exactly the same set as the unpruned
/// builder; combo_tests counts only completed full-length evaluations, so it
/// is strictly smaller whenever any combination is infeasible.
FeasibleSet build_feasible_set_pruned(const Codebook& codebook, const FreqChannel& si,
                                      int num_chains, const EtaConstants& eta,
                                      ConditionVariant variant, const CMatrix* w_rf,
                                      OpCounter& counter, LinkMode link = LinkMode::kTxOnly);

Allowlist extract_allowlist(const FeasibleSet& fs, const Codebook& codebook);

/// Every C-choose-L combination, in the same lexicographic order the
/// builders enumerate; the unconstrained selection pool.
FeasibleSet all_combinations(const Codebook& codebook, int num_chains);

/// Receive-side restraint for the two-stage mode: with the transmit precoder
/// fixed, keep the receive-beam combinations whose combiner satisfies the
/// per-chain budget.
FeasibleSet restrain_rx_link(const CMatrix& f_rf, const Codebook& codebook_rx,
                             const FreqChannel& si, double eta_adc, ConditionVariant variant,
                             OpCounter& counter);

/// Re-evaluate one combination against its construction condition; used to
/// audit feasible sets independently of the builder's fast path.
bool recheck_combo(const BeamCombo& combo, const Codebook& codebook, const FreqChannel& si,
                   const EtaConstants& eta, ConditionVariant variant, const CMatrix* w_rf,
                   LinkMode link = LinkMode::kTxOnly);

struct MeasurementCount {
  long tx_link = 0;      // desired-link sweep with the reduced codebook
  long tx_baseline = 0;  // same sweep with the full codebook
  long rx_link = 0;      // reverse-link sweep, unaffected by the reduction
  long total = 0;        // tx_link + rx_link
};

MeasurementCount measurement_count(int allowlist_size, int c_r_desired, int c_t_full,
                                   int c_r_own, int c_t_peer);

/// Number of L-subsets of a C-element set (exact for the sizes used here).
std::uint64_t binomial(int c, int l);

}  // namespace fdbeam
