#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "ltgap/band_structure.hpp"
#include "ltgap/errors.hpp"
#include "ltgap/gap_counting.hpp"
#include "ltgap/lt_bounds.hpp"
#include "ltgap/oracles.hpp"

using namespace ltgap;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
const GapSet kFree{{-2.0, 2.0}};
}  // namespace

TEST_CASE("lt_sum") {
  CHECK(lt_sum({-2.5}, kFree, 0.5).sum == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(lt_sum({}, kFree, 0.5).sum == 0.0);
  CHECK(lt_sum({13.0 / 6.0}, kFree, 0.5).sum == doctest::Approx(std::sqrt(1.0 / 6.0)).epsilon(1e-14));
  CHECK_THROWS_AS(lt_sum({1.0}, kFree, 0.5), EigenvalueInBand);
  CHECK(lt_sum({-3.0, 3.0}, kFree, 1.0, Interval{2.0, kInf}).sum == doctest::Approx(1.0));
}

TEST_CASE("gap_sum_experiment anchors") {
  GapSumSetup setup;
  setup.delta_b = {{0, 1.5}};
  setup.ess = kFree;
  setup.regions = complement_regions(kFree);
  const GapSumSeries s = gap_sum_experiment(setup, {0.0, 1.0}, {2000});
  REQUIRE(s.points.size() == 2);
  CHECK(s.points[0].report.sum == 0.0);
  CHECK(s.points[0].report.ratio == 0.0);
  const LtSumReport& r = s.points[1].report;
  REQUIRE(r.eigenvalues.size() == 1);
  CHECK(std::abs(r.sum - std::sqrt(1.0 / 6.0)) <= 1e-8);
  CHECK(r.rhs == 1.5);
  CHECK(std::abs(r.ratio - std::sqrt(1.0 / 6.0) / 1.5) <= 1e-8);
}

TEST_CASE("period-2 sweep is stable under size doubling") {
  GapSumSetup setup;
  setup.period_a = {1.0, 1.0};
  setup.period_b = {1.0, -1.0};
  setup.extent = Extent::WholeLine;
  setup.delta_b = {{0, -1.0}, {1, 0.5}};
  setup.ess = periodic_band_set(setup.period_a, setup.period_b);
  setup.regions = complement_regions(setup.ess);
  std::vector<double> lambdas;
  for (int k = 0; k < 5; ++k) lambdas.push_back(0.1 * std::pow(100.0, k / 4.0));
  const GapSumSeries s = gap_sum_experiment(setup, lambdas, {1001, 2001});
  double sup_small = 0.0, sup_big = 0.0;
  for (const auto& p : s.points) {
    double& sup = p.size == 1001 ? sup_small : sup_big;
    sup = std::max(sup, p.report.ratio);
  }
  REQUIRE(sup_small > 0.0);
  CHECK(std::isfinite(sup_small));
  CHECK(std::abs(sup_big - sup_small) / sup_small < 0.05);
}

TEST_CASE("complement regions") {
  const GapSet g{{-3.0, -1.0}, {1.0, 3.0}};
  const auto r = complement_regions(g);
  REQUIRE(r.size() == 3);
  CHECK(r[0].hi == -3.0);
  CHECK(r[1].lo == -1.0);
  CHECK(r[1].hi == 1.0);
  CHECK(r[2].lo == 3.0);
}

TEST_CASE("layer cake") {
  auto f = [](double y) { return std::sqrt(1.0 - y); };
  auto fp = [](double t) { return -0.5 / std::sqrt(t); };
  const LayerCakeReport none = layer_cake_check({5.0}, -1.0, 1.0, f, fp);
  CHECK(none.direct == 0.0);
  CHECK(none.piecewise == 0.0);
  const LayerCakeReport one = layer_cake_check({0.3}, -1.0, 1.0, f, fp);
  CHECK(one.direct == doctest::Approx(std::sqrt(0.7)).epsilon(1e-15));
  CHECK(std::abs(one.piecewise - std::sqrt(0.7)) <= 1e-12);
  CHECK(std::abs(one.quadrature - std::sqrt(0.7)) <= 1e-10);

  for (std::uint64_t i = 0; i < 100; ++i) {
    SplitMix64 rng(31, i);
    Eigen::VectorXd spec(30);
    for (Eigen::Index k = 0; k < 30; ++k) spec(k) = k < 5 ? rng.uniform(-0.95, 0.95) : rng.uniform(1.2, 4.0);
    const Eigen::MatrixXd q = rng.orthogonal(30);
    const auto ev = oracle::jacobi_rotation_eigenvalues(q * spec.asDiagonal() * q.transpose());
    double direct = 0.0;
    for (double e : ev)
      if (e >= -1.0 && e <= 1.0) direct += f(e);
    const LayerCakeReport r = layer_cake_check(ev, -1.0, 1.0, f, fp);
    CHECK(r.count == 5);
    CHECK(r.holds);
    CHECK(std::abs(r.piecewise - direct) <= 1e-8);
  }
}

TEST_CASE("tail bound") {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(3, 3);
  b(0, 0) = -2.0;
  const TailBoundReport r = tail_bound_check(Eigen::MatrixXd::Identity(3, 3), b);
  CHECK(r.count == 1);
  CHECK(r.lhs == doctest::Approx(std::sqrt(2.0)));
  CHECK(r.rhs == doctest::Approx(2.0));
  CHECK(r.holds);
  const TailBoundReport z = tail_bound_check(Eigen::MatrixXd::Identity(3, 3), Eigen::MatrixXd::Zero(3, 3));
  CHECK(z.lhs == 0.0);
  CHECK(z.holds);

  for (std::uint64_t i = 0; i < 200; ++i) {
    SplitMix64 rng(32, i);
    const auto n = static_cast<Eigen::Index>(rng.between(2, 15));
    const Eigen::MatrixXd a = random_symmetric(rng, n), bb = random_symmetric(rng, n, 3.0);
    const TailBoundReport t = tail_bound_check(a, bb);
    CHECK(t.holds);
    const auto eb = oracle::jacobi_rotation_eigenvalues(bb);
    double tr = 0.0;
    for (double x : eb) tr += std::abs(x);
    CHECK(std::abs(t.rhs - tr) <= 1e-10 * std::max(1.0, tr));
  }
}

TEST_CASE("single-site constant study matches the closed form") {
  // -lambda delta_0 on the free line: one eigenvalue -sqrt(lambda^2 + 4).
  const auto rows = critical_constant_study({1.0}, {0.0, 0.5, 1.0, 2.0}, 300);
  CHECK(rows[0].ratio == 0.0);
  CHECK(rows[0].count == 0);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double l = rows[i].lambda;
    const double exact = std::sqrt(std::sqrt(l * l + 4.0) - 2.0) / l;
    CHECK(rows[i].count == 1);
    CHECK(std::abs(rows[i].ratio - exact) <= 1e-8);
    if (l <= 1.0) CHECK(rows[i].ratio < 0.5);
  }
}
