#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "fdbeam/channel.hpp"
#include "test_util.hpp"

using namespace fdbeam;

namespace {
constexpr double kPi = std::numbers::pi;

std::vector<Path> random_paths(std::mt19937_64& rng, int count, double max_delay) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Path> paths;
  for (int i = 0; i < count; ++i) {
    Path p;
    p.gain = testutil::random_complex(rng);
    p.delay_s = unif(rng) * max_delay;
    p.aoa_el = (unif(rng) - 0.5) * kPi;
    p.aoa_az = (unif(rng) - 0.5) * 2.0 * kPi;
    p.aod_el = (unif(rng) - 0.5) * kPi;
    p.aod_az = (unif(rng) - 0.5) * 2.0 * kPi;
    paths.push_back(p);
  }
  return paths;
}
}  // namespace

TEST_CASE("array response at broadside is the scaled all-ones vector") {
  const ArrayGeometry geom{4, 2, 0.5};
  const CVector a = upa_array_response(geom, 0.0, 0.0);
  for (int i = 0; i < a.size(); ++i) {
    CHECK(a(i).real() == doctest::Approx(1.0 / std::sqrt(8.0)).epsilon(1e-14));
    CHECK(a(i).imag() == doctest::Approx(0.0).epsilon(1e-14));
  }
}

TEST_CASE("array responses have unit norm for arbitrary directions") {
  const ArrayGeometry geom{16, 4, 0.5};
  auto rng = testutil::make_rng(7);
  std::uniform_real_distribution<double> unif(-kPi, kPi);
  for (int i = 0; i < 50; ++i) {
    const CVector a = upa_array_response(geom, unif(rng), unif(rng));
    CHECK(std::abs(a.norm() - 1.0) <= 1e-12);
  }
}

TEST_CASE("two-element array with a half-cycle phase step") {
  // At half-wavelength spacing, an endfire direction puts the elements in
  // antiphase: response (1, -1)/sqrt(2).
  const ArrayGeometry geom{2, 1, 0.5};
  const CVector a = upa_array_response(geom, kPi / 2.0, 0.0);
  CHECK(std::abs(a(0) - Complex(1.0 / std::sqrt(2.0), 0.0)) <= 1e-12);
  CHECK(std::abs(a(1) - Complex(-1.0 / std::sqrt(2.0), 0.0)) <= 1e-12);
}

TEST_CASE("single zero-delay path produces one rank-1 tap") {
  const ArrayGeometry geom{4, 1, 0.5};
  Path p;
  p.gain = Complex(1.0, 0.0);
  p.aoa_el = 0.3;
  p.aod_el = -0.2;
  const FarfieldTaps out = gen_farfield_taps({p}, geom, geom, 1e-9, 4);
  CHECK(out.dropped_paths == 0);
  CHECK(out.taps.taps[0].squaredNorm() > 0.0);
  for (int d = 1; d < 4; ++d) CHECK(out.taps.taps[static_cast<size_t>(d)].squaredNorm() == 0.0);

  Eigen::JacobiSVD<CMatrix> svd(out.taps.taps[0]);
  CHECK(svd.singularValues()(0) == doctest::Approx(1.0).epsilon(1e-12));
  for (int i = 1; i < svd.singularValues().size(); ++i)
    CHECK(svd.singularValues()(i) <= 1e-12);
}

TEST_CASE("opposite-gain twin paths cancel") {
  const ArrayGeometry geom{2, 2, 0.5};
  Path a;
  a.gain = Complex(0.7, -0.3);
  a.delay_s = 2e-9;
  a.aoa_el = 0.4;
  a.aod_az = 1.0;
  Path b = a;
  b.gain = -a.gain;
  const FarfieldTaps out = gen_farfield_taps({a, b}, geom, geom, 1e-9, 8);
  for (const CMatrix& tap : out.taps.taps) CHECK(tap.norm() <= 1e-15);
}

TEST_CASE("tap accumulation matches the per-path oracle") {
  const ArrayGeometry tx{4, 2, 0.5};
  const ArrayGeometry rx{2, 2, 0.5};
  auto rng = testutil::make_rng(11);
  const double ts = 1e-9;
  const int d_count = 6;
  const auto paths = random_paths(rng, 3, 5e-9);

  const FarfieldTaps out = gen_farfield_taps(paths, tx, rx, ts, d_count);

  // Oracle: accumulate each path independently into its delay bin.
  std::vector<CMatrix> expected(d_count, CMatrix::Zero(rx.size(), tx.size()));
  for (const Path& p : paths) {
    const long bin = std::max(std::lround(p.delay_s / ts), 1L);
    REQUIRE(bin <= d_count);
    const CVector ar = upa_array_response(rx, p.aoa_el, p.aoa_az);
    const CVector at = upa_array_response(tx, p.aod_el, p.aod_az);
    expected[static_cast<size_t>(bin - 1)] += p.gain * (ar * at.adjoint());
  }
  for (int d = 0; d < d_count; ++d)
    CHECK((out.taps.taps[static_cast<size_t>(d)] - expected[static_cast<size_t>(d)]).cwiseAbs().maxCoeff() <=
          1e-12);
}

TEST_CASE("tap accumulation is linear in the path list") {
  const ArrayGeometry geom{3, 2, 0.5};
  auto rng = testutil::make_rng(13);
  const auto a = random_paths(rng, 4, 6e-9);
  const auto b = random_paths(rng, 3, 6e-9);
  std::vector<Path> both = a;
  both.insert(both.end(), b.begin(), b.end());

  const auto out_a = gen_farfield_taps(a, geom, geom, 1e-9, 8);
  const auto out_b = gen_farfield_taps(b, geom, geom, 1e-9, 8);
  const auto out_both = gen_farfield_taps(both, geom, geom, 1e-9, 8);
  for (int d = 0; d < 8; ++d) {
    const CMatrix sum = out_a.taps.taps[static_cast<size_t>(d)] + out_b.taps.taps[static_cast<size_t>(d)];
    CHECK((out_both.taps.taps[static_cast<size_t>(d)] - sum).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("paths beyond the tap window are dropped and tallied") {
  const ArrayGeometry geom{2, 1, 0.5};
  Path near;
  near.gain = Complex(1.0, 0.0);
  near.delay_s = 1e-9;
  Path far = near;
  far.delay_s = 100e-9;
  const FarfieldTaps out = gen_farfield_taps({near, far}, geom, geom, 1e-9, 4);
  CHECK(out.dropped_paths == 1);
  CHECK(out.taps.taps[0].squaredNorm() > 0.0);
}

TEST_CASE("farfield generator rejects a non-positive sample interval") {
  const ArrayGeometry geom{2, 1, 0.5};
  CHECK_THROWS_AS(gen_farfield_taps({Path{}}, geom, geom, 0.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(gen_farfield_taps({Path{}}, geom, geom, -1e-9, 4), std::invalid_argument);
}

TEST_CASE("single-element coupling entry is a pure phasor when rho equals the distance") {
  const ArrayGeometry geom{1, 1, 0.5};
  const double lambda = 0.0107;
  const double r = 0.1;
  const CMatrix h = gen_nearfield_si(geom, geom, r, lambda, r);
  REQUIRE(h.rows() == 1);
  REQUIRE(h.cols() == 1);
  CHECK(std::abs(std::abs(h(0, 0)) - 1.0) <= 1e-12);
  const double phase = -2.0 * kPi * r / lambda;
  CHECK(std::abs(h(0, 0) - Complex(std::cos(phase), std::sin(phase))) <= 1e-12);
}

TEST_CASE("normalized coupling matrix hits the small-scale power target") {
  const ArrayGeometry geom{16, 4, 0.5};
  const CMatrix h = gen_nearfield_si_normalized(geom, geom, 0.1, 0.0107);
  const double target = 64.0 * 64.0;
  CHECK(std::abs(h.squaredNorm() - target) / target <= 1e-9);
}

TEST_CASE("coupling matrix matches the per-entry oracle on a 2x2 face pair") {
  const ArrayGeometry geom{2, 1, 0.5};
  const double lambda = 0.01;
  const double sep = 0.05;
  const double rho = 0.3;
  const CMatrix h = gen_nearfield_si(geom, geom, sep, lambda, rho);

  const double step = 0.5 * lambda;  // element spacing in meters
  for (int q = 0; q < 2; ++q) {
    for (int p = 0; p < 2; ++p) {
      const Eigen::Vector3d tx(0.0, p * step, 0.0);
      const Eigen::Vector3d rx(0.0, q * step, -sep);
      const double r = (rx - tx).norm();
      const double phase = -2.0 * kPi * r / lambda;
      const Complex expected = (rho / r) * Complex(std::cos(phase), std::sin(phase));
      CHECK(std::abs(h(q, p) - expected) <= 1e-12);
    }
  }
}

TEST_CASE("coincident elements across faces are rejected") {
  // Unit-wavelength spacing with a one-spacing separation stacks an rx
  // element exactly onto a tx element.
  const ArrayGeometry geom{1, 2, 1.0};
  const double lambda = 0.01;
  CHECK_THROWS_AS(gen_nearfield_si(geom, geom, lambda, lambda, 1.0), std::invalid_argument);
}

TEST_CASE("rician mixing at kappa zero keeps the far-field taps") {
  auto rng = testutil::make_rng(17);
  TapChannel far;
  far.sample_interval_s = 1e-9;
  for (int d = 0; d < 3; ++d) far.taps.push_back(testutil::random_matrix(rng, 2, 2));
  const CMatrix near = testutil::random_matrix(rng, 2, 2);

  const TapChannel mixed = combine_rician(near, far, 0.0);
  for (int d = 0; d < 3; ++d)
    CHECK((mixed.taps[static_cast<size_t>(d)] - far.taps[static_cast<size_t>(d)]).norm() == 0.0);
}

TEST_CASE("rician mixing at huge kappa converges to the near-field matrix") {
  auto rng = testutil::make_rng(19);
  TapChannel far;
  far.sample_interval_s = 1e-9;
  for (int d = 0; d < 2; ++d) far.taps.push_back(CMatrix::Zero(3, 3));
  const CMatrix near = testutil::random_matrix(rng, 3, 3);

  const TapChannel mixed = combine_rician(near, far, 1e12);
  CHECK((mixed.taps[0] - near).norm() / near.norm() <= 1e-6);
  CHECK(mixed.taps[1].norm() == 0.0);
}

TEST_CASE("rician mixing at kappa one splits power evenly") {
  auto rng = testutil::make_rng(23);
  TapChannel far;
  far.sample_interval_s = 1e-9;
  for (int d = 0; d < 3; ++d) far.taps.push_back(testutil::random_matrix(rng, 2, 3));
  const CMatrix near = testutil::random_matrix(rng, 2, 3);

  const TapChannel mixed = combine_rician(near, far, 1.0);
  const double w = 1.0 / std::sqrt(2.0);
  for (int d = 0; d < 3; ++d) {
    CMatrix expected = w * far.taps[static_cast<size_t>(d)];
    if (d == 0) expected += w * near;
    CHECK((mixed.taps[static_cast<size_t>(d)] - expected).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("rician mixing rejects negative kappa and mismatched shapes") {
  TapChannel far;
  far.sample_interval_s = 1e-9;
  far.taps.push_back(CMatrix::Zero(2, 2));
  CHECK_THROWS_AS(combine_rician(CMatrix::Zero(2, 2), far, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(combine_rician(CMatrix::Zero(3, 2), far, 1.0), std::invalid_argument);
}

TEST_CASE("single first-bin tap yields flat per-entry magnitude across subcarriers") {
  auto rng = testutil::make_rng(29);
  TapChannel taps;
  taps.sample_interval_s = 1e-9;
  taps.taps.push_back(testutil::random_matrix(rng, 2, 3));

  const FreqChannel chan = taps_to_subcarriers(taps, 8);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 3; ++c) {
      const double expected = std::abs(taps.taps[0](r, c));
      for (const CMatrix& h : chan.per_subcarrier)
        CHECK(std::abs(h(r, c)) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("zero taps transform to zero subcarriers") {
  TapChannel taps;
  taps.sample_interval_s = 1e-9;
  for (int d = 0; d < 3; ++d) taps.taps.push_back(CMatrix::Zero(2, 2));
  const FreqChannel chan = taps_to_subcarriers(taps, 8);
  for (const CMatrix& h : chan.per_subcarrier) CHECK(h.norm() == 0.0);
}

TEST_CASE("subcarrier transform matches the direct double-loop oracle") {
  auto rng = testutil::make_rng(31);
  TapChannel taps;
  taps.sample_interval_s = 1e-9;
  for (int d = 0; d < 3; ++d) taps.taps.push_back(testutil::random_matrix(rng, 2, 2));
  const int u_count = 8;

  const FreqChannel chan = taps_to_subcarriers(taps, u_count);
  for (int u = 1; u <= u_count; ++u) {
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        Complex expected(0.0, 0.0);
        for (int d = 1; d <= 3; ++d) {
          const double phase = -2.0 * kPi * u * d / u_count;
          expected += taps.taps[static_cast<size_t>(d - 1)](r, c) *
                      Complex(std::cos(phase), std::sin(phase));
        }
        CHECK(std::abs(chan.per_subcarrier[static_cast<size_t>(u - 1)](r, c) - expected) <= 1e-12);
      }
    }
  }
}

TEST_CASE("subcarrier transform satisfies per-entry energy conservation") {
  auto rng = testutil::make_rng(37);
  for (int instance = 0; instance < 20; ++instance) {
    const int d_count = 1 + static_cast<int>(rng() % 4);
    const int u_count = d_count + static_cast<int>(rng() % (16 - d_count + 1));
    TapChannel taps;
    taps.sample_interval_s = 1e-9;
    for (int d = 0; d < d_count; ++d) taps.taps.push_back(testutil::random_matrix(rng, 2, 2));

    const FreqChannel chan = taps_to_subcarriers(taps, u_count);
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        double freq_energy = 0.0;
        for (const CMatrix& h : chan.per_subcarrier) freq_energy += std::norm(h(r, c));
        double tap_energy = 0.0;
        for (const CMatrix& t : taps.taps) tap_energy += std::norm(t(r, c));
        CHECK(freq_energy == doctest::Approx(u_count * tap_energy).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("subcarrier transform rejects invalid sizes") {
  TapChannel taps;
  taps.sample_interval_s = 1e-9;
  taps.taps.push_back(CMatrix::Zero(2, 2));
  taps.taps.push_back(CMatrix::Zero(2, 2));
  CHECK_THROWS_AS(taps_to_subcarriers(taps, 0), std::invalid_argument);
  CHECK_THROWS_AS(taps_to_subcarriers(taps, 1), std::invalid_argument);  // fewer than taps
  CHECK_THROWS_AS(taps_to_subcarriers(TapChannel{}, 4), std::invalid_argument);
}
