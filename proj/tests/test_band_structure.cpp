#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "ltgap/band_structure.hpp"
#include "ltgap/eigensolve.hpp"
#include "ltgap/errors.hpp"
#include "ltgap/oracles.hpp"

using namespace ltgap;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("Floquet bands, closed forms") {
  for (double theta : {0.0, 0.4, 1.7, kPi}) {
    const Eigen::MatrixXcd h1 = floquet_matrix({1.0}, {0.0}, theta);
    CHECK(std::abs(h1(0, 0).real() - 2.0 * std::cos(theta)) <= 1e-15);
  }
  const double beta = 0.8;
  const BlochData d = bloch_bands({1.0, 1.0}, {beta, -beta}, 32);
  for (std::size_t k = 0; k < d.theta.size(); ++k) {
    const double e = std::sqrt(beta * beta + 2.0 + 2.0 * std::cos(d.theta[k]));
    CHECK(std::abs(d.bands[0][k] + e) <= 1e-12);
    CHECK(std::abs(d.bands[1][k] - e) <= 1e-12);
  }
}

TEST_CASE("band union is the limit of truncation spectra") {
  const std::vector<double> a{1.0, 1.0}, b{1.0, -1.0};
  const GapSet bands = periodic_band_set(a, b);
  const auto ev = eig_tridiagonal(build_periodic(a, b, 2000));
  // Hausdorff distance between the truncation spectrum and the bands.
  double to_bands = 0.0;
  for (double e : ev) to_bands = std::max(to_bands, bands.distance(e));
  double to_spec = 0.0;
  for (const Band& band : bands.bands())
    for (int i = 0; i <= 200; ++i) {
      const double x = band.lo + (band.hi - band.lo) * i / 200.0;
      double best = 1e300;
      for (double e : ev) best = std::min(best, std::abs(e - x));
      to_spec = std::max(to_spec, best);
    }
  CHECK(std::max(to_bands, to_spec) < 0.02);
}

TEST_CASE("gap detection") {
  const GapSet free = detect_gaps(bloch_bands({1.0}, {0.0}, 16));
  REQUIRE(free.band_count() == 1);
  CHECK(std::abs(free.lower() + 2.0) <= 1e-12);
  CHECK(std::abs(free.upper() - 2.0) <= 1e-12);

  const GapSet two = periodic_band_set({1.0, 1.0}, {1.0, -1.0});
  REQUIRE(two.band_count() == 2);
  CHECK(std::abs(two.bands()[0].lo + std::sqrt(5.0)) <= 1e-12);
  CHECK(std::abs(two.bands()[0].hi + 1.0) <= 1e-12);
  CHECK(std::abs(two.bands()[1].lo - 1.0) <= 1e-12);
  CHECK(std::abs(two.bands()[1].hi - std::sqrt(5.0)) <= 1e-12);

  CHECK(periodic_band_set({1.0, 1.0}, {0.0, 0.0}).band_count() == 1);
}

TEST_CASE("edge expansion") {
  const EdgeExpansion x = edge_expansion({1.0, 1.0}, {1.0, -1.0}, {-1.0, 1.0}, EdgeSide::TopOfGap, {0.2, 64});
  CHECK(std::abs(x.edge_energy - 1.0) <= 1e-12);
  CHECK(std::abs(x.c1 - 0.5) <= 0.025);
  // Lower bound of (E(k) - 1)/k^2 from the closed form E(pi + k) = sqrt(3 - 2 cos k).
  double inf = 1e300;
  for (double k : x.k) inf = std::min(inf, (std::sqrt(3.0 - 2.0 * std::cos(k)) - 1.0) / (k * k));
  CHECK(std::abs(x.c1 - inf) <= 1e-10);

  const EdgeExpansion bottom = edge_expansion({1.0, 1.0}, {1.0, -1.0}, {-1.0, 1.0}, EdgeSide::BottomOfGap, {0.2, 64});
  CHECK(std::abs(bottom.edge_energy + 1.0) <= 1e-12);
  CHECK(std::abs(bottom.c1 - x.c1) <= 1e-10);

  CHECK_THROWS_AS(edge_expansion({1.0, 1.0}, {0.0, 0.0}, {0.0, 0.0}, EdgeSide::TopOfGap), ClosedGap);
  CHECK_THROWS_AS(edge_expansion({1.0}, {0.0}, {2.0, 3.0}, EdgeSide::TopOfGap), ClosedGap);

  const EdgeExpansion half = edge_expansion({1.0, 1.0}, {1.0, -1.0}, {-1.0, 1.0}, EdgeSide::TopOfGap, {0.1, 64});
  CHECK(half.c3_linear <= 2.0 * x.c3_linear);
}

TEST_CASE("continuum discriminant") {
  const PeriodicPotential zero{[](double) { return 0.0; }, 2.0 * kPi, {}};
  for (double e : {0.1, 0.7, 2.3, 5.0}) {
    const DiscriminantValue d = continuum_discriminant(zero, e);
    CHECK(std::abs(d.delta - 2.0 * std::cos(2.0 * kPi * std::sqrt(e))) <= 1e-8);
    CHECK(std::abs(d.determinant - 1.0) <= 1e-10);
  }
  for (double e : {-0.05, -0.3}) {
    const double exact = 2.0 * std::cosh(2.0 * kPi * std::sqrt(-e));
    CHECK(std::abs(continuum_discriminant(zero, e).delta - exact) <= 1e-8 * exact);
  }

  // Mathieu potential against the RK4 oracle.
  auto v = [](double x) { return 2.0 * std::cos(x); };
  const PeriodicPotential mathieu{v, 2.0 * kPi, {}};
  for (double e : {-0.5, 0.3, 1.1}) CHECK(std::abs(continuum_discriminant(mathieu, e).delta - oracle::rk4_discriminant(v, 2.0 * kPi, e)) <= 1e-8);
}

TEST_CASE("continuum band edges") {
  const PeriodicPotential zero{[](double) { return 0.0; }, 2.0 * kPi, {}};
  const ContinuumBands fb = continuum_band_edges(zero, 0.01, 4.0);
  CHECK(fb.bands.gaps().empty());

  auto v = [](double x) { return 2.0 * std::cos(x); };
  const ContinuumBands mb = continuum_band_edges({v, 2.0 * kPi, {}}, -1.0, 3.0);
  const auto gaps = mb.bands.gaps();
  REQUIRE(gaps.size() >= 2);
  CHECK(gaps[0].hi - gaps[0].lo > 0.1);
  CHECK(gaps[1].hi - gaps[1].lo > 0.0);
  const auto oracle_bands = oracle::rk4_bands(v, 2.0 * kPi, -1.0, 3.0, 200);
  REQUIRE(oracle_bands.size() >= 2);
  CHECK(std::abs(gaps[0].lo - oracle_bands[0].second) <= 1e-6);
  CHECK(std::abs(gaps[0].hi - oracle_bands[1].first) <= 1e-6);
}

TEST_CASE("finite-difference gap eigenvalues") {
  ContinuumGapSetup s;
  s.v0 = {[](double x) { return 2.0 * std::cos(x); }, 2.0 * kPi, {}};
  s.v = [](double x) { return x >= 0.0 && x <= kPi ? -1.0 : 0.0; };
  s.support_lo = 0.0;
  s.support_hi = kPi;
  s.v_breakpoints = {0.0, kPi};
  s.points_per_period = 32;
  s.periods = 16;
  CHECK(continuum_gap_point(s, 0.0, 32, 16).eigenvalues.empty());

  const ContinuumGapPoint coarse = continuum_gap_point(s, 1.0, 32, 16);
  const ContinuumGapPoint fine = continuum_gap_point(s, 1.0, 64, 16);
  const ContinuumGapPoint finer = continuum_gap_point(s, 1.0, 128, 16);
  REQUIRE(!coarse.eigenvalues.empty());
  REQUIRE(coarse.eigenvalues.size() == fine.eigenvalues.size());
  REQUIRE(fine.eigenvalues.size() == finer.eigenvalues.size());
  for (std::size_t i = 0; i < coarse.eigenvalues.size(); ++i) {
    const double order = std::log2(std::abs(coarse.eigenvalues[i] - fine.eigenvalues[i]) /
                                   std::abs(fine.eigenvalues[i] - finer.eigenvalues[i]));
    CHECK(order == doctest::Approx(2.0).epsilon(0.25));
  }
}
