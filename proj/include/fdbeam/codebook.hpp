#pragma once

#include <cstdint>
#include <utility>

#include "fdbeam/types.hpp"

namespace fdbeam {

/// Ordered set of unit-norm analog beams for one array face. Beam ids are
/// 1-based and index the columns of `beams`.
struct Codebook {
  CMatrix beams;              // N x C, one beam per column
  std::vector<int> beam_ids;  // 1..C

  int num_beams() const { return static_cast<int>(beams.cols()); }
  int beam_length() const { return static_cast<int>(beams.rows()); }

  /// Column of the beam with the given 1-based id.
  CVector beam(int id) const { return beams.col(id - 1); }
};

struct ArrayFactorCurve {
  std::vector<std::pair<double, double>> grid;  // (elevation, azimuth) radians
  std::vector<double> gain;                     // linear power per grid point
};

/// DFT beam codebook for a planar array: the Kronecker product of an
/// n_horizontal-point and an n_vertical-point DFT vector set. Every beam is
/// constant-modulus with |entry| = 1/sqrt(N) and the set is orthonormal.
/// Beam id = c_h * n_vertical + c_v + 1 (same horizontal-major order as the
/// element indexing).
Codebook gen_dft_codebook(const ArrayGeometry& geometry);

/// Power pattern of one beam over an angle grid, scaled so a beam matched
/// to the array response of a direction peaks at N there.
ArrayFactorCurve array_factor(const CVector& beam, const ArrayGeometry& geometry,
                              const std::vector<std::pair<double, double>>& grid);

/// Order-sensitive hash of the beam entries, used to tag dumped artifacts.
std::uint64_t codebook_hash(const Codebook& codebook);

}  // namespace fdbeam
