#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "ltgap/band_structure.hpp"
#include "ltgap/errors.hpp"
#include "ltgap/oracles.hpp"
#include "ltgap/szego.hpp"

using namespace ltgap;

namespace {
constexpr double kPi = std::numbers::pi;
const GapSet kFree{{-2.0, 2.0}};
}  // namespace

TEST_CASE("m-function") {
  for (double y : {1e3, 1e5}) {
    const std::complex<double> z(0.0, y);
    CHECK(std::abs(m_free(z) + 1.0 / z) <= 2.0 / (y * y * y));
  }
  const HalfLineModel free_model;
  for (auto z : {std::complex<double>(0.3, 0.1), std::complex<double>(-3.0, 0.5), std::complex<double>(1.9, 1e-3)})
    CHECK(std::abs(m_function(free_model, z) - m_free(z)) <= 1e-13);

  // Finite continued fraction for a single head site: m = 1 / (b0 - z - m_free(z)).
  const HalfLineModel one = half_line_model({1.0}, {0.0}, JacobiPerturbation{}.set_b(0, 1.5));
  const std::complex<double> z(0.4, 0.2);
  CHECK(std::abs(m_function(one, z) - 1.0 / (1.5 - z - m_free(z))) <= 1e-13);
  CHECK_THROWS(m_function(one, std::complex<double>(0.4, 0.0)));
}

TEST_CASE("free density") {
  const HalfLineModel free_model;
  CHECK(std::abs(density_at(free_model, kFree, 0.0) - 1.0 / kPi) <= 1e-9);
  for (double x : {-1.9, -1.0, 0.5, 1.5, 1.99})
    CHECK(std::abs(density_at(free_model, kFree, x) - free_density(x)) <= 1e-8);
  CHECK(density_at(free_model, kFree, 2.5) == 0.0);
}

TEST_CASE("perturbed density against smoothed Gauss weights of a truncation") {
  const JacobiPerturbation pert = JacobiPerturbation{}.set_b(0, 1.5);
  const HalfLineModel model = half_line_model({1.0}, {0.0}, pert);
  const std::size_t n = 800;
  std::vector<double> diag(n, 0.0), off(n - 1, 1.0);
  diag[0] = 1.5;
  const auto [nodes, weights] = oracle::tridiagonal_measure(diag, off);
  const double sigma = 0.05;
  const double norm = 1.0 / (sigma * std::sqrt(2.0 * kPi));
  double worst = 0.0;
  for (int i = 0; i <= 38; ++i) {
    const double x = -1.9 + 0.1 * i;
    auto integrand = [&](double y) {
      const double u = (x - y) / sigma;
      return density_at(model, kFree, y) * norm * std::exp(-0.5 * u * u);
    };
    const double lo = std::max(-2.0, x - 10.0 * sigma), hi = std::min(2.0, x + 10.0 * sigma);
    const double smoothed_density = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, lo, hi, 15, 1e-12);
    worst = std::max(worst, std::abs(smoothed_density - oracle::smoothed_measure(nodes, weights, x, sigma)));
  }
  CHECK(worst <= 1e-3);
}

TEST_CASE("density plus gap point masses has total mass 1") {
  for (double b0 : {0.5, 1.5, -2.5}) {
    const HalfLineModel model = half_line_model({1.0}, {0.0}, JacobiPerturbation{}.set_b(0, b0));
    const double ac = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double x) { return density_at(model, kFree, x); }, -2.0, 2.0, 15, 1e-10);
    const std::size_t n = 800;
    std::vector<double> diag(n, 0.0), off(n - 1, 1.0);
    diag[0] = b0;
    const auto [nodes, weights] = oracle::tridiagonal_measure(diag, off);
    double point = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k)
      if (std::abs(nodes[k]) > 2.0 + 1e-3) point += weights[k];
    CHECK(std::abs(ac + point - 1.0) <= 1e-3);
    // |b0| > 1 binds exactly one eigenvalue, with mass 1 - 1/b0^2.
    CHECK(std::abs(point - (std::abs(b0) > 1.0 ? 1.0 - 1.0 / (b0 * b0) : 0.0)) <= 1e-10);
  }
}

TEST_CASE("Szego integral") {
  const HalfLineModel free_model;
  const SzegoResult free_sz = szego_integral(spectral_density(free_model, kFree).evaluate, kFree);
  CHECK(std::abs(free_sz.value + kPi * std::log(2.0 * kPi)) <= 1e-4);

  // Independent check of the closed form by plain midpoint quadrature in theta.
  double mid = 0.0;
  const int m = 200000;
  for (int i = 0; i < m; ++i) {
    const double t = (i + 0.5) * kPi / m;
    mid += std::log(free_density(2.0 * std::cos(t)));
  }
  mid *= kPi / m;
  CHECK(std::abs(mid + kPi * std::log(2.0 * kPi)) <= 1e-4);

  const double c = 3.0;
  const SzegoResult scaled = szego_integral([&](double x) { return c * free_density(x); }, kFree);
  CHECK(std::abs(scaled.value - free_sz.value - kPi * std::log(c)) <= 1e-6);

  const HalfLineModel pert = half_line_model({1.0}, {0.0}, JacobiPerturbation{}.set_b(0, 1.5));
  const SzegoResult p = szego_integral(spectral_density(pert, kFree).evaluate, kFree, 1e-9);
  CHECK(std::isfinite(p.value));
  CHECK(p.last_change <= 1e-4);
}

TEST_CASE("capacity") {
  const CapacityEstimate c60 = capacity_fekete(kFree, 60);
  CHECK(std::abs(c60.value - 1.0) <= 1e-3);
  CHECK(std::abs(capacity_periodic({1.0}, {0.0}).value - 1.0) <= 1e-15);
  CHECK(std::abs(capacity_fekete(GapSet{{-1.0, 1.0}}, 60).value - 0.5) <= 1e-3);
  const GapSet two = periodic_band_set({1.0, 1.0}, {1.0, -1.0});
  CHECK(std::abs(capacity_fekete(two, 80).value - 1.0) <= 1e-2);
  CHECK(std::abs(capacity_symmetric_two_intervals(1.0, std::sqrt(5.0)) - 1.0) <= 1e-15);
  CHECK(std::abs(capacity_periodic({1.0, 1.0}, {1.0, -1.0}).value - 1.0) <= 1e-15);
}

TEST_CASE("product limit") {
  const auto ones = product_limit_check([](std::size_t) { return 1.0; }, 1.0, 1024);
  CHECK(ones.min_value == 1.0);
  CHECK(ones.max_value == 1.0);
  const auto two = product_limit_check([](std::size_t n) { return n == 0 ? 2.0 : 1.0; }, 1.0, 1024);
  CHECK(two.min_value == 2.0);
  CHECK(two.max_value == 2.0);

  auto a = [](std::size_t n) { return 1.0 + std::ldexp(1.0, -static_cast<int>(n) - 1); };
  long double exact = 1.0L;
  for (int k = 1; k < 120; ++k) exact *= 1.0L + std::ldexp(1.0L, -k);
  const auto geo = product_limit_check(a, 1.0, 4096);
  CHECK(std::abs(geo.limit - static_cast<double>(exact)) <= 1e-12);
  CHECK(std::abs(geo.limit - 2.384231029) <= 1e-9);
  CHECK(geo.bounded);
  // Cauchy at N = 40.
  double p40 = 1.0;
  for (std::size_t n = 0; n < 40; ++n) p40 *= a(n);
  CHECK(std::abs(p40 - geo.limit) <= 1e-6);
}

TEST_CASE("Nevai pipeline") {
  const NevaiReport zero = nevai_pipeline({1.0}, {0.0}, JacobiPerturbation{});
  CHECK(zero.lt_sum == 0.0);
  CHECK(std::abs(zero.product_limit - 1.0) <= 1e-12);
  CHECK(std::abs(zero.szego + kPi * std::log(2.0 * kPi)) <= 1e-4);

  const NevaiReport p = nevai_pipeline({1.0}, {0.0}, JacobiPerturbation{}.set_b(0, 1.5));
  CHECK(p.finite);
  CHECK(p.eigenvalue_count == 1);
  // Whole-line eigenvalue of delta b_0 = 1.5: sqrt(1.5^2 + 4) = 2.5, distance 0.5.
  CHECK(std::abs(p.lt_sum - std::sqrt(0.5)) <= 1e-8);

  for (double c : {0.5, 1.0, 2.0}) {
    const NevaiReport x = nevai_pipeline({1.0, 1.0}, {1.0, -1.0}, JacobiPerturbation{}.set_b(0, c));
    CHECK(x.finite);
    CHECK(std::isfinite(x.szego));
  }
}
