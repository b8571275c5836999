#include "fdbeam/codebook.hpp"

#include <cmath>
#include <cstring>
#include <numbers>

#include "fdbeam/channel.hpp"

namespace fdbeam {

namespace {

// Columns of the unitary n-point DFT matrix, entries exp(j 2 pi k c / n) / sqrt(n).
CMatrix dft_columns(int n) {
  CMatrix m(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int c = 0; c < n; ++c) {
    for (int k = 0; k < n; ++k) {
      const double phase = 2.0 * std::numbers::pi * k * c / n;
      m(k, c) = scale * Complex(std::cos(phase), std::sin(phase));
    }
  }
  return m;
}

}  // namespace

Codebook gen_dft_codebook(const ArrayGeometry& geometry) {
  geometry.validate();
  const int nh = geometry.n_horizontal;
  const int nv = geometry.n_vertical;
  const CMatrix dh = dft_columns(nh);
  const CMatrix dv = dft_columns(nv);

  Codebook cb;
  cb.beams.resize(nh * nv, nh * nv);
  cb.beam_ids.reserve(static_cast<size_t>(nh) * nv);
  for (int ch = 0; ch < nh; ++ch) {
    for (int cv = 0; cv < nv; ++cv) {
      const int id = ch * nv + cv;  // horizontal-major, matching element order
      for (int h = 0; h < nh; ++h)
        for (int v = 0; v < nv; ++v) cb.beams(h * nv + v, id) = dh(h, ch) * dv(v, cv);
      cb.beam_ids.push_back(id + 1);
    }
  }
  return cb;
}

ArrayFactorCurve array_factor(const CVector& beam, const ArrayGeometry& geometry,
                              const std::vector<std::pair<double, double>>& grid) {
  geometry.validate();
  if (beam.size() != geometry.size())
    throw std::invalid_argument("array_factor: beam length must match element count");

  ArrayFactorCurve curve;
  curve.grid = grid;
  curve.gain.reserve(grid.size());
  const double n = static_cast<double>(geometry.size());
  for (const auto& [el, az] : grid) {
    const CVector a = upa_array_response(geometry, el, az);
    curve.gain.push_back(std::norm(a.dot(beam)) * n);
  }
  return curve;
}

std::uint64_t codebook_hash(const Codebook& codebook) {
  // FNV-1a over the raw little-endian bytes of the beam entries.
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof(bits));
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xffull;
      h *= 1099511628211ull;
    }
  };
  for (int c = 0; c < codebook.beams.cols(); ++c) {
    for (int r = 0; r < codebook.beams.rows(); ++r) {
      mix(codebook.beams(r, c).real());
      mix(codebook.beams(r, c).imag());
    }
  }
  return h;
}

}  // namespace fdbeam
