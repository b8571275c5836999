#pragma once

#include "fdbeam/types.hpp"

namespace fdbeam {

/// Far-field plane-wave response of a uniform planar array toward
/// (elevation, azimuth), scaled to unit 2-norm. See ArrayGeometry for the
/// indexing and angle conventions.
CVector upa_array_response(const ArrayGeometry& geometry, double elevation, double azimuth);

struct FarfieldTaps {
  TapChannel taps;
  int dropped_paths = 0;  // paths whose delay bin rounded past the last tap
};

/// Accumulate rank-1 path contributions into delay bins. A path with delay
/// tau lands in bin clamp(round(tau / sample_interval), 1, num_taps); paths
/// rounding past the last bin are dropped and tallied.
FarfieldTaps gen_farfield_taps(const std::vector<Path>& paths, const ArrayGeometry& geometry_tx,
                               const ArrayGeometry& geometry_rx, double sample_interval_s,
                               int num_taps);

/// Spherical-wave coupling matrix between two co-located array faces
/// separated vertically by separation_m. Entry (q, p) couples tx element p
/// to rx element q as (rho / r_qp) * exp(-j 2 pi r_qp / lambda).
CMatrix gen_nearfield_si(const ArrayGeometry& geometry_tx, const ArrayGeometry& geometry_rx,
                         double separation_m, double wavelength_m, double normalization);

/// Same, with rho chosen so the squared Frobenius norm equals N_t * N_r
/// (the small-scale normalization used by every synthesized channel here).
CMatrix gen_nearfield_si_normalized(const ArrayGeometry& geometry_tx,
                                    const ArrayGeometry& geometry_rx, double separation_m,
                                    double wavelength_m);

/// Rician mixture of a delay-zero near-field matrix and far-field taps:
/// tap 1 gains sqrt(kappa/(kappa+1)) * near, every tap keeps
/// sqrt(1/(kappa+1)) of its far-field content.
TapChannel combine_rician(const CMatrix& near, const TapChannel& far, double kappa);

/// U-point transform of the tap channel onto subcarriers:
/// H[u] = sum_d taps[d] * exp(-j 2 pi u d / U), u = 1..U, d = 1..D.
FreqChannel taps_to_subcarriers(const TapChannel& taps, int num_subcarriers);

}  // namespace fdbeam
