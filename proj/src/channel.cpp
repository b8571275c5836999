#include "fdbeam/channel.hpp"

#include <cmath>
#include <numbers>

namespace fdbeam {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

std::vector<Eigen::Vector3d> ArrayGeometry::positions_m(double wavelength_m) const {
  validate();
  if (!(wavelength_m > 0.0))
    throw std::invalid_argument("ArrayGeometry: wavelength must be > 0");
  std::vector<Eigen::Vector3d> pos;
  pos.reserve(static_cast<size_t>(size()));
  const double step = spacing_wavelengths * wavelength_m;
  for (int h = 0; h < n_horizontal; ++h)
    for (int v = 0; v < n_vertical; ++v)
      pos.emplace_back(0.0, h * step, v * step);
  return pos;
}

CVector upa_array_response(const ArrayGeometry& geometry, double elevation, double azimuth) {
  geometry.validate();
  const int nh = geometry.n_horizontal;
  const int nv = geometry.n_vertical;
  const int n = nh * nv;
  // Direction cosines along the two array axes.
  const double se = std::sin(elevation);
  const double uy = se * std::cos(azimuth);
  const double uz = se * std::sin(azimuth);
  const double psi_h = kTwoPi * geometry.spacing_wavelengths * uy;
  const double psi_v = kTwoPi * geometry.spacing_wavelengths * uz;

  CVector a(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int h = 0; h < nh; ++h) {
    for (int v = 0; v < nv; ++v) {
      const double phase = psi_h * h + psi_v * v;
      a(h * nv + v) = scale * Complex(std::cos(phase), std::sin(phase));
    }
  }
  return a;
}

FarfieldTaps gen_farfield_taps(const std::vector<Path>& paths, const ArrayGeometry& geometry_tx,
                               const ArrayGeometry& geometry_rx, double sample_interval_s,
                               int num_taps) {
  geometry_tx.validate();
  geometry_rx.validate();
  if (!(sample_interval_s > 0.0))
    throw std::invalid_argument("gen_farfield_taps: sample_interval_s must be > 0");
  if (num_taps < 1) throw std::invalid_argument("gen_farfield_taps: num_taps must be >= 1");

  FarfieldTaps out;
  out.taps.sample_interval_s = sample_interval_s;
  out.taps.taps.assign(static_cast<size_t>(num_taps),
                       CMatrix::Zero(geometry_rx.size(), geometry_tx.size()));

  for (const Path& p : paths) {
    if (p.delay_s < 0.0) throw std::invalid_argument("gen_farfield_taps: negative path delay");
    // Delay bins are 1-based; a zero-delay path lands in the first bin.
    const long bin = std::lround(p.delay_s / sample_interval_s);
    if (bin > num_taps) {
      ++out.dropped_paths;
      continue;
    }
    const long d = std::max(bin, 1L);
    const CVector ar = upa_array_response(geometry_rx, p.aoa_el, p.aoa_az);
    const CVector at = upa_array_response(geometry_tx, p.aod_el, p.aod_az);
    out.taps.taps[static_cast<size_t>(d - 1)].noalias() += p.gain * (ar * at.adjoint());
  }
  return out;
}

CMatrix gen_nearfield_si(const ArrayGeometry& geometry_tx, const ArrayGeometry& geometry_rx,
                         double separation_m, double wavelength_m, double normalization) {
  if (!(separation_m > 0.0))
    throw std::invalid_argument("gen_nearfield_si: separation must be > 0");
  const auto tx_pos = geometry_tx.positions_m(wavelength_m);
  const auto rx_pos = geometry_rx.positions_m(wavelength_m);
  // The receive face is displaced along the vertical array axis.
  const Eigen::Vector3d offset(0.0, 0.0, -separation_m);

  CMatrix h(geometry_rx.size(), geometry_tx.size());
  for (int q = 0; q < geometry_rx.size(); ++q) {
    for (int p = 0; p < geometry_tx.size(); ++p) {
      const double r = (rx_pos[static_cast<size_t>(q)] + offset - tx_pos[static_cast<size_t>(p)]).norm();
      if (!(r > 0.0))
        throw std::invalid_argument("gen_nearfield_si: coincident tx/rx elements");
      const double phase = -kTwoPi * r / wavelength_m;
      h(q, p) = (normalization / r) * Complex(std::cos(phase), std::sin(phase));
    }
  }
  return h;
}

CMatrix gen_nearfield_si_normalized(const ArrayGeometry& geometry_tx,
                                    const ArrayGeometry& geometry_rx, double separation_m,
                                    double wavelength_m) {
  CMatrix h = gen_nearfield_si(geometry_tx, geometry_rx, separation_m, wavelength_m, 1.0);
  const double target = static_cast<double>(geometry_tx.size()) * geometry_rx.size();
  const double norm_sq = h.squaredNorm();
  if (!(norm_sq > 0.0)) throw std::runtime_error("gen_nearfield_si: zero coupling matrix");
  h *= std::sqrt(target / norm_sq);
  return h;
}

TapChannel combine_rician(const CMatrix& near, const TapChannel& far, double kappa) {
  if (kappa < 0.0) throw std::invalid_argument("combine_rician: kappa must be >= 0");
  if (far.taps.empty()) throw std::invalid_argument("combine_rician: empty tap channel");
  if (near.rows() != far.rows() || near.cols() != far.cols())
    throw std::invalid_argument("combine_rician: dimension mismatch");

  const double w_near = std::sqrt(kappa / (kappa + 1.0));
  const double w_far = std::sqrt(1.0 / (kappa + 1.0));
  TapChannel out;
  out.sample_interval_s = far.sample_interval_s;
  out.taps.reserve(far.taps.size());
  for (const CMatrix& t : far.taps) out.taps.push_back(w_far * t);
  out.taps[0].noalias() += w_near * near;  // near-field coupling has zero delay
  return out;
}

FreqChannel taps_to_subcarriers(const TapChannel& taps, int num_subcarriers) {
  if (num_subcarriers < 1)
    throw std::invalid_argument("taps_to_subcarriers: num_subcarriers must be >= 1");
  const int d_count = taps.num_taps();
  if (d_count < 1) throw std::invalid_argument("taps_to_subcarriers: empty tap channel");
  if (num_subcarriers < d_count)
    throw std::invalid_argument("taps_to_subcarriers: need at least as many subcarriers as taps");

  FreqChannel out;
  out.per_subcarrier.reserve(static_cast<size_t>(num_subcarriers));
  for (int u = 1; u <= num_subcarriers; ++u) {
    CMatrix acc = CMatrix::Zero(taps.rows(), taps.cols());
    for (int d = 1; d <= d_count; ++d) {
      const double phase = -kTwoPi * static_cast<double>(u) * d / num_subcarriers;
      acc.noalias() += Complex(std::cos(phase), std::sin(phase)) * taps.taps[static_cast<size_t>(d - 1)];
    }
    out.per_subcarrier.push_back(std::move(acc));
  }
  return out;
}

}  // namespace fdbeam
