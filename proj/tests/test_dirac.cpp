#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "ltgap/dirac.hpp"
#include "ltgap/oracles.hpp"

using namespace ltgap;

namespace {
constexpr double kPi = std::numbers::pi;

DiracConfig well_config(double lambda, std::size_t k = 64) {
  DiracConfig c;
  c.mass = 1.0;
  c.box_length = 10.0;
  c.half_modes = k;
  c.potential = square_well(lambda, 0.0, 1.0);
  return c;
}
}  // namespace

TEST_CASE("Fourier coefficients of a square well") {
  const double l = 10.0, lambda = 0.5;
  const auto c = fourier_coefficients(square_well(lambda, 0.0, 1.0), l, 8);
  for (int n = -8; n <= 8; ++n) {
    std::complex<double> exact = -lambda / l;
    if (n != 0) {
      const double w = 2.0 * kPi * n / l;
      exact = -lambda / l * (1.0 - std::exp(std::complex<double>(0.0, -w))) / std::complex<double>(0.0, w);
    }
    CHECK(std::abs(c[static_cast<std::size_t>(n + 8)] - exact) <= 1e-14);
  }
}

TEST_CASE("free Dirac spectrum") {
  DiracConfig cfg;
  cfg.half_modes = 6;
  cfg.potential = {[](double) { return 0.0; }, {}};
  const Eigen::MatrixXcd d = dirac_matrix(cfg);
  CHECK((d - d.adjoint()).norm() == 0.0);
  std::vector<double> exact;
  for (double k : grid_momenta(cfg)) {
    exact.push_back(std::sqrt(k * k + cfg.mass * cfg.mass));
    exact.push_back(-std::sqrt(k * k + cfg.mass * cfg.mass));
  }
  std::sort(exact.begin(), exact.end());
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(d).eigenvalues();
  for (std::size_t i = 0; i < exact.size(); ++i) CHECK(std::abs(ev(static_cast<Eigen::Index>(i)) - exact[i]) <= 1e-12);
  CHECK(dirac_gap_eigs(cfg, false).eigenvalues.empty());
}

TEST_CASE("square well gap eigenvalues") {
  const GapEigReport r = dirac_gap_eigs(well_config(0.5), true);
  REQUIRE(!r.eigenvalues.empty());
  CHECK(r.converged);
  CHECK(r.refinement_shift <= 1e-6);
  CHECK(std::abs(r.eigenvalues.front()) < 1.0);

  // (t m, t V(t x), L / t) has eigenvalues t E.
  const DiracConfig base = well_config(0.5, 32);
  const GapEigReport e1 = dirac_gap_eigs(base, false);
  const GapEigReport e2 = dirac_gap_eigs(scaled_config(base, 2.0), false);
  REQUIRE(e1.eigenvalues.size() == e2.eigenvalues.size());
  for (std::size_t i = 0; i < e1.eigenvalues.size(); ++i)
    CHECK(std::abs(e2.eigenvalues[i] - 2.0 * e1.eigenvalues[i]) <= 1e-10);
}

TEST_CASE("scalar relativistic sums") {
  DiracConfig zero = well_config(0.0, 16);
  zero.potential = {[](double) { return 0.0; }, {}};
  const auto z = scalar_relativistic_sums(zero, 0.5);
  CHECK(z.first == 0.0);
  CHECK(z.second == 0.0);

  // The jumps of the well make the Galerkin error O(K^-2); check the rate on
  // small cutoffs, then 1e-6 stability where the doubling step gets there.
  std::vector<double> s_k;
  for (std::size_t k : {32, 64, 128}) {
    const auto w = scalar_relativistic_sums(well_config(0.5, k), 0.5);
    CHECK(w.first > 0.0);
    CHECK(w.second == 0.0);
    s_k.push_back(w.first);
  }
  CHECK(std::log2((s_k[1] - s_k[0]) / (s_k[2] - s_k[1])) == doctest::Approx(2.0).epsilon(0.15));
  const double s512 = scalar_relativistic_sums(well_config(0.5, 512), 0.5).first;
  const double s1024 = scalar_relativistic_sums(well_config(0.5, 1024), 0.5).first;
  CHECK(std::abs(s1024 - s512) <= 1e-6);

  // Dense check of S_{1/2}(H0 - V-) from the assembled matrix.
  const DiracConfig cfg = well_config(0.5, 16);
  const Eigen::MatrixXcd h = scalar_matrix(cfg, potential_parts(cfg.potential, cfg.box_length).second);
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h).eigenvalues();
  double s = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) < 0.0) s += std::sqrt(-ev(i));
  CHECK(std::abs(scalar_relativistic_sums(cfg, 0.5).first - s) <= 1e-12);
}

TEST_CASE("reduction inequality") {
  DiracConfig zero = well_config(0.0, 16);
  zero.potential = {[](double) { return 0.0; }, {}};
  const ReductionReport z = check_reduction(zero, 0.5);
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);
  CHECK(z.holds);

  for (double gamma : {0.5, 1.0}) {
    const ReductionReport r = check_reduction(well_config(1.0, 32), gamma);
    CHECK(r.holds);
    CHECK(r.slack > 0.0);
  }
  for (std::uint64_t i = 0; i < 20; ++i) {
    SplitMix64 rng(71, i);
    DiracConfig cfg;
    cfg.box_length = rng.uniform(4.0, 12.0);
    cfg.mass = rng.uniform(0.5, 2.0);
    cfg.half_modes = 24;
    cfg.potential = random_trig_potential(rng, cfg.box_length);
    CHECK(check_reduction(cfg, 0.5).holds);
    CHECK(check_reduction(cfg, 1.0).holds);
  }
}

TEST_CASE("symbol inequalities") {
  const SymbolReport r = symbol_inequalities(1.0, 1.0, 1000);
  CHECK(r.c1 == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-15));
  CHECK(r.c2 == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-15));
  CHECK(r.holds);
  for (double rho : {0.5, 2.0}) {
    const SymbolReport x = symbol_inequalities(rho, 3.0, 10000);
    CHECK(x.holds);
    CHECK(x.boundary_defect <= 1e-14 * 3.0 * rho);
    // Independent closed forms.
    CHECK(x.c1 == doctest::Approx((std::sqrt(rho * rho + 1.0) - 1.0) / (rho * rho)));
    CHECK(x.c2 == doctest::Approx((std::sqrt(rho * rho + 1.0) - 1.0) / rho));
  }
}

TEST_CASE("resolvent comparison") {
  const DiracConfig cfg = well_config(0.5, 16);
  for (double e : {-0.9, 0.0, 0.7}) CHECK(resolvent_comparison(cfg, e).holds);
}

TEST_CASE("weight sweep") {
  const WeightReport w = weight_bound_sweep(square_well(-1.0, 0.0, 1.0), {0.5, 1.0}, {0.0, 0.5, 1.0}, 0.5, 10.0, 32);
  for (const WeightRow& row : w.rows)
    if (row.lambda == 0.0) CHECK(row.ratio == 0.0);
  CHECK(w.bounded);
}
