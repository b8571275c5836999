#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

namespace fdbeam {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

/// One propagation path: small-scale complex gain, absolute delay and the
/// departure/arrival directions in radians.
struct Path {
  Complex gain{0.0, 0.0};
  double delay_s = 0.0;
  double aoa_el = 0.0;
  double aoa_az = 0.0;
  double aod_el = 0.0;
  double aod_az = 0.0;
};

/// Uniform planar array, n_horizontal x n_vertical elements on a regular
/// grid with the given inter-element spacing in carrier wavelengths.
///
/// Conventions used throughout (codebook generation relies on the same
/// ordering):
///  - the array lies in the y-z plane with boresight along +x,
///  - element (h, v) sits at (0, h*spacing, v*spacing) in wavelength units,
///  - elements are indexed horizontal-major: index = h * n_vertical + v,
///  - the phase reference is element (0, 0),
///  - elevation is measured from the boresight axis, azimuth rotates the
///    direction inside the array plane: a unit direction is
///    (cos(el), sin(el)cos(az), sin(el)sin(az)).
struct ArrayGeometry {
  int n_horizontal = 1;
  int n_vertical = 1;
  double spacing_wavelengths = 0.5;

  int size() const { return n_horizontal * n_vertical; }

  void validate() const {
    if (n_horizontal < 1 || n_vertical < 1)
      throw std::invalid_argument("ArrayGeometry: element counts must be positive");
    if (!(spacing_wavelengths > 0.0))
      throw std::invalid_argument("ArrayGeometry: spacing must be positive");
  }

  /// Element positions in meters for a given carrier wavelength, in index
  /// order (horizontal-major).
  std::vector<Eigen::Vector3d> positions_m(double wavelength_m) const;
};

/// Tap-domain MIMO channel: taps[d] is the N_r x N_t matrix at delay bin d
/// (bins are 1-based in the frequency transform; taps[0] is bin 1).
struct TapChannel {
  std::vector<CMatrix> taps;
  double sample_interval_s = 0.0;

  int num_taps() const { return static_cast<int>(taps.size()); }
  int rows() const { return taps.empty() ? 0 : static_cast<int>(taps.front().rows()); }
  int cols() const { return taps.empty() ? 0 : static_cast<int>(taps.front().cols()); }
};

/// Per-subcarrier MIMO channel. per_subcarrier[u-1] corresponds to
/// subcarrier index u in 1..U.
struct FreqChannel {
  std::vector<CMatrix> per_subcarrier;

  int num_subcarriers() const { return static_cast<int>(per_subcarrier.size()); }
  int rows() const {
    return per_subcarrier.empty() ? 0 : static_cast<int>(per_subcarrier.front().rows());
  }
  int cols() const {
    return per_subcarrier.empty() ? 0 : static_cast<int>(per_subcarrier.front().cols());
  }
};

/// Parameters of the self-interference channel between the co-located
/// transmit and receive faces of the full-duplex node.
struct SiChannelSpec {
  double rician_kappa = 0.0;         // power ratio near-field : far-field
  double tx_rx_separation_m = 0.1;   // vertical face separation
  double carrier_wavelength_m = 0.0107068735;
  std::vector<Path> farfield_paths;

  void validate() const {
    if (rician_kappa < 0.0)
      throw std::invalid_argument("SiChannelSpec: rician_kappa must be >= 0");
    if (!(tx_rx_separation_m > 0.0))
      throw std::invalid_argument("SiChannelSpec: separation must be > 0");
    if (!(carrier_wavelength_m > 0.0))
      throw std::invalid_argument("SiChannelSpec: wavelength must be > 0");
  }
};

}  // namespace fdbeam
