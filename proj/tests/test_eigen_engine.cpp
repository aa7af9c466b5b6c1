#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "ltgap/eigensolve.hpp"
#include "ltgap/oracles.hpp"
#include "ltgap/random.hpp"

using namespace ltgap;

namespace {

SymTridiagonal random_tridiagonal(SplitMix64& rng, std::size_t n) {
  SymTridiagonal t;
  for (std::size_t i = 0; i < n; ++i) t.diag.push_back(rng.uniform(-3.0, 3.0));
  for (std::size_t i = 0; i + 1 < n; ++i) t.off.push_back(rng.uniform(0.1, 2.0));
  return t;
}

Eigen::MatrixXd random_dense(SplitMix64& rng, Eigen::Index n) {
  const Eigen::MatrixXd g = rng.gaussian(n, n);
  return 0.5 * (g + g.transpose());
}

}  // namespace

TEST_CASE("eig_tridiagonal") {
  const auto one = eig_tridiagonal(SymTridiagonal{{3.0}, {}});
  REQUIRE(one.size() == 1);
  CHECK(one[0] == 3.0);

  for (std::uint64_t i = 0; i < 20; ++i) {
    SplitMix64 rng(3, i);
    const SymTridiagonal t = random_tridiagonal(rng, 50);
    const auto ev = eig_tridiagonal(t);
    const auto ref = oracle::jacobi_rotation_eigenvalues(t.dense());
    REQUIRE(ev.size() == ref.size());
    for (std::size_t k = 0; k < ev.size(); ++k) CHECK(std::abs(ev[k] - ref[k]) <= 1e-10);
  }
}

TEST_CASE("count_below") {
  const JacobiOperator f = build_free(5, Extent::HalfLine);
  CHECK(count_below(f, 0.5).count == 3);
  CHECK(count_below(f, -3.0).count == 0);
  CHECK_THROWS_AS(count_below(f, 1.0), SingularShift);

  for (std::uint64_t i = 0; i < 50; ++i) {
    SplitMix64 rng(4, i);
    const SymTridiagonal t = random_tridiagonal(rng, 80);
    const double e = rng.uniform(-4.0, 4.0);
    const auto ref = oracle::jacobi_rotation_eigenvalues(t.dense());
    CHECK(count_below(t, e).count == oracle::count_below(ref, e));
    CHECK(sturm_count(t, e) == oracle::count_below(ref, e));
  }
}

TEST_CASE("with_nudge moves a shift off the spectrum") {
  const JacobiOperator f = build_free(5, Extent::HalfLine);
  const auto [result, used] = with_nudge([&](double e) { return count_below(f, e); }, 1.0, 2.0);
  CHECK(used != 1.0);
  CHECK(std::abs(used - 1.0) <= 1e-8);
  CHECK(result.count == (used > 1.0 ? 4u : 3u));
}

TEST_CASE("count_in_interval") {
  const JacobiOperator f = build_free(5, Extent::HalfLine);
  CHECK(count_in_interval(f.tridiagonal(), Interval{-1.5, 1.5}).count == 3);
  CHECK(count_in_interval(f.dense(), Interval{1.0, 1.0}).count == 0);
  CHECK(count_in_interval(f.dense(), Interval{2.0, -2.0}).count == 0);

  for (std::uint64_t i = 0; i < 50; ++i) {
    SplitMix64 rng(5, i);
    const Eigen::MatrixXd c = random_dense(rng, 40);
    double lo = rng.uniform(-8.0, 8.0), hi = rng.uniform(-8.0, 8.0);
    if (lo > hi) std::swap(lo, hi);
    const auto ref = oracle::jacobi_rotation_eigenvalues(c);
    const std::size_t expected = oracle::count_below(ref, hi) - oracle::count_below(ref, lo);
    CHECK(count_in_interval(c, Interval{lo, hi}).count == expected);
  }
}

TEST_CASE("spectral_projector") {
  const Eigen::MatrixXd d = Eigen::Vector3d(1.0, 2.0, 3.0).asDiagonal();
  CHECK((spectral_projector(d, {0.0, 4.0}).matrix - Eigen::MatrixXd::Identity(3, 3)).norm() <= 1e-14);
  CHECK(spectral_projector(d, {-5.0, 0.0}).matrix.norm() == 0.0);
  const SpectralProjector p = spectral_projector(d, {1.5, 2.5});
  Eigen::MatrixXd e2 = Eigen::MatrixXd::Zero(3, 3);
  e2(1, 1) = 1.0;
  CHECK((p.matrix - e2).norm() <= 1e-14);
  CHECK(p.rank == 1);
  CHECK_THROWS_AS(spectral_projector(d, {2.0, 2.5}), SingularShift);
}

TEST_CASE("tridiagonal quadrature reproduces moments") {
  SplitMix64 rng(6, 0);
  const SymTridiagonal t = random_tridiagonal(rng, 30);
  const QuadratureRule q = tridiagonal_quadrature(t);
  const auto [nodes, weights] = oracle::tridiagonal_measure(t.diag, t.off);
  REQUIRE(q.nodes.size() == nodes.size());
  double total = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    CHECK(std::abs(q.nodes[k] - nodes[k]) <= 1e-10);
    CHECK(std::abs(q.weights[k] - weights[k]) <= 1e-10);
    total += q.weights[k];
  }
  CHECK(std::abs(total - 1.0) <= 1e-12);
  // <e0, T^2 e0> = b0^2 + a0^2.
  double m2 = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) m2 += q.weights[k] * q.nodes[k] * q.nodes[k];
  CHECK(std::abs(m2 - (t.diag[0] * t.diag[0] + t.off[0] * t.off[0])) <= 1e-10);
}

TEST_CASE("inverse iteration eigenvector") {
  SplitMix64 rng(7, 0);
  const SymTridiagonal t = random_tridiagonal(rng, 40);
  const auto ev = eig_tridiagonal(t);
  const Eigen::MatrixXd m = t.dense();
  for (std::size_t k : {std::size_t{0}, std::size_t{17}, std::size_t{39}}) {
    const Eigen::VectorXd v = tridiagonal_eigenvector(t, ev[k]);
    CHECK(std::abs(v.norm() - 1.0) <= 1e-12);
    CHECK((m * v - ev[k] * v).norm() <= 1e-9);
  }
}
