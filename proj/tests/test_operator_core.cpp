#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "ltgap/eigensolve.hpp"
#include "ltgap/errors.hpp"
#include "ltgap/jacobi.hpp"
#include "ltgap/oracles.hpp"
#include "ltgap/random.hpp"

using namespace ltgap;

TEST_CASE("free truncation entries") {
  const JacobiOperator j = build_free(5, Extent::HalfLine);
  CHECK(j.off_diagonal() == std::vector<double>{1, 1, 1, 1});
  CHECK(j.diagonal() == std::vector<double>{0, 0, 0, 0, 0});
  const JacobiOperator one = build_free(1, Extent::HalfLine);
  CHECK(one.off_diagonal().empty());
  CHECK(one.diagonal() == std::vector<double>{0});
}

TEST_CASE("free size-5 spectrum is 2cos(j pi / 6)") {
  const auto ev = eig_tridiagonal(build_free(5, Extent::HalfLine));
  REQUIRE(ev.size() == 5);
  for (int k = 0; k < 5; ++k) CHECK(ev[k] == doctest::Approx(2.0 * std::cos((5 - k) * std::numbers::pi / 6.0)).epsilon(1e-13));
}

TEST_CASE("periodic builder") {
  const std::vector<double> a1{1.0}, b1{0.0};
  const JacobiOperator p = build_periodic(a1, b1, 7);
  const JacobiOperator f = build_free(7, Extent::HalfLine);
  CHECK(p.diagonal() == f.diagonal());
  CHECK(p.off_diagonal() == f.off_diagonal());

  const double beta = 0.7;
  const std::vector<double> a2{1.0, 1.0}, b2{beta, -beta};
  CHECK(build_periodic(a2, b2, 6).diagonal() == std::vector<double>{beta, -beta, beta, -beta, beta, -beta});

  // Band edges: beta^2 <= E^2 <= beta^2 + 4.
  const std::vector<double> b3{1.0, -1.0};
  const auto ev = eig_tridiagonal(build_periodic(a2, b3, 400));
  CHECK(ev.back() <= std::sqrt(5.0));
  CHECK(ev.back() >= std::sqrt(5.0) - 0.01);
}

TEST_CASE("whole-line windows are centered on site 0") {
  const std::vector<double> a{1.0, 1.0}, b{2.0, -2.0};
  const JacobiOperator w = build_periodic(a, b, 11, Extent::WholeLine);
  CHECK(w.index_of_site(0) == 5);
  CHECK(w.diagonal()[w.index_of_site(0)] == 2.0);
  CHECK(w.diagonal()[w.index_of_site(-1)] == -2.0);
}

TEST_CASE("perturbations") {
  const JacobiOperator f = build_free(6, Extent::HalfLine);
  JacobiPerturbation db;
  db.set_b(0, -1.0);
  const JacobiOperator j = apply_perturbation(f, db);
  CHECK(j.diagonal()[0] == -1.0);
  CHECK(j.diagonal()[1] == 0.0);
  CHECK(j.perturbation_norm() == 1.0);

  JacobiPerturbation kill;
  kill.set_a(0, -1.0);
  CHECK_THROWS_AS(apply_perturbation(f, kill), InvalidArgument);

  // beta + 1/beta above the spectrum for beta = 1.5, with a dense rotation oracle.
  JacobiPerturbation b15;
  b15.set_b(0, 1.5);
  const JacobiOperator big = apply_perturbation(build_free(4000, Extent::HalfLine), b15);
  const auto top = eig_tridiagonal(big, Interval{2.0, 10.0});
  REQUIRE(top.size() == 1);
  CHECK(std::abs(top[0] - 13.0 / 6.0) <= 1e-8);
  const JacobiOperator small = apply_perturbation(build_free(60, Extent::HalfLine), b15);
  const auto dense = oracle::jacobi_rotation_eigenvalues(small.dense());
  CHECK(std::abs(dense.back() - 13.0 / 6.0) <= 1e-8);
}

TEST_CASE("signed splitting") {
  JacobiPerturbation db;
  db.set_b(0, -1.0);
  const SignedJacobiPair s = split_signed(db, 5);
  CHECK(s.plus.dense().cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.minus.diag[0] == 1.0);
  CHECK(s.minus.trace() <= 1.0);

  JacobiPerturbation da;
  da.set_a(0, 0.5);
  const SignedJacobiPair t = split_signed(da, 5);
  const Eigen::MatrixXd p = t.plus.dense();
  CHECK(p(0, 0) == 0.25);
  CHECK(p(0, 1) == 0.25);
  CHECK(p(1, 1) == 0.25);
  const auto ev = oracle::jacobi_rotation_eigenvalues(p);
  CHECK(ev.front() >= -1e-15);
  CHECK(std::count_if(ev.begin(), ev.end(), [](double x) { return x > 1e-12; }) == 1);

  for (std::uint64_t i = 0; i < 100; ++i) {
    SplitMix64 rng(11, i);
    const std::size_t n = rng.between(4, 30);
    JacobiPerturbation q;
    for (int k = 0; k < 3; ++k) {
      q.set_a(rng.below(n - 1), rng.normal());
      q.set_b(rng.below(n), rng.normal());
    }
    const SignedJacobiPair pair = split_signed(q, n);
    const auto ep = oracle::jacobi_rotation_eigenvalues(pair.plus.dense());
    const auto em = oracle::jacobi_rotation_eigenvalues(pair.minus.dense());
    CHECK(ep.front() >= -1e-12);
    CHECK(em.front() >= -1e-12);
    CHECK((pair.plus.dense() - pair.minus.dense() - q.matrix(n).dense()).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("diagonal potential parts") {
  const DiagonalPotential v({1.0, -2.0, 0.0, 3.0});
  CHECK(v.positive_part() == std::vector<double>{1, 0, 0, 3});
  CHECK(v.negative_part() == std::vector<double>{0, 2, 0, 0});
  CHECK(v.l1_norm() == 6.0);
}

TEST_CASE("SplitMix64 reference outputs") {
  // Values from an independent Python transcription of docs/rng.md.
  SplitMix64 a(42, 0);
  CHECK(a() == 0x57e1faba65107204ULL);
  CHECK(a() == 0xf4abd143feb24055ULL);
  CHECK(a.uniform() == 0.48634953628166855);
  SplitMix64 b(42, (std::uint64_t{1} << 40) | 5);
  CHECK(b() == 0x4c4af0356f0c3fe4ULL);
  CHECK(b.uniform() == 0.3650136132916315);
}
