#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "ltgap/eigensolve.hpp"
#include "ltgap/errors.hpp"
#include "ltgap/gap_counting.hpp"
#include "ltgap/oracles.hpp"

using namespace ltgap;

namespace {

Eigen::MatrixXd diag(std::initializer_list<double> v) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) d(i++) = x;
  return d.asDiagonal();
}

std::vector<double> spectrum(const Eigen::MatrixXd& m) { return oracle::jacobi_rotation_eigenvalues(m); }

// Counts by dense enumeration, independent of the library's inertia code.
std::size_t n_below(const Eigen::MatrixXd& m, double e) { return oracle::count_below(spectrum(m), e); }
std::size_t n_above(const Eigen::MatrixXd& m, double c) {
  const auto ev = spectrum(m);
  return static_cast<std::size_t>(std::count_if(ev.begin(), ev.end(), [c](double x) { return x > c; }));
}

}  // namespace

TEST_CASE("BS matrix") {
  const BirmanSchwingerMatrix k = bs_matrix(diag({0.0}), diag({2.0}), 1.0);
  CHECK(k.matrix(0, 0) == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(bs_matrix(diag({0.0, 3.0}), Eigen::MatrixXd::Zero(2, 2), 1.0).matrix.norm() == 0.0);
  CHECK_THROWS_AS(bs_matrix(diag({0.0, 1.0}), diag({1.0, 1.0}), 1.0), SingularShift);

  for (std::uint64_t i = 0; i < 20; ++i) {
    SplitMix64 rng(21, i);
    const Eigen::MatrixXd a = random_symmetric(rng, 20);
    const Eigen::MatrixXd b = random_psd(rng, 20, 5, 1.0);
    const double e = rng.uniform(-1.0, 1.0);
    const Eigen::MatrixXd root = psd_sqrt(b);
    const Eigen::MatrixXd shifted = a - e * Eigen::MatrixXd::Identity(20, 20);
    const Eigen::MatrixXd ref = root * oracle::gauss_jordan_inverse(shifted) * root;
    CHECK((bs_matrix(a, b, e).matrix - ref).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, ref.norm()));
  }
}

TEST_CASE("crossing counts, scalar and diagonal cases") {
  const CrossingCount s = delta_counts(diag({0.0}), diag({2.0}), 1.0);
  CHECK(s.delta_plus == 1);
  CHECK(s.delta_minus == 0);
  const CrossingCount z = delta_counts(diag({0.0, 4.0}), Eigen::MatrixXd::Zero(2, 2), 1.0);
  CHECK(z.delta_plus == 0);
  CHECK(z.delta_minus == 0);

  const CrossingCount o1 = crossing_oracle(diag({0.0}), diag({2.0}), 1.0);
  CHECK(o1.delta_plus == 1);
  CHECK(o1.delta_minus == 0);
  CHECK(crossing_oracle(diag({0.0, 5.0}), diag({2.0, 2.0}), 1.0).delta_plus == 1);
  CHECK(crossing_oracle(diag({0.0, 0.5}), diag({2.0, 2.0}), 1.0).delta_plus == 2);
}

TEST_CASE("crossing counts agree with the path-tracking oracle") {
  for (std::uint64_t i = 0; i < 300; ++i) {
    SplitMix64 rng(22, i);
    const GapInstance g = random_gap_instance(rng);
    const double scale = matrix_scale(g.a) + matrix_scale(g.b_plus);
    const auto [pair, e] = with_nudge(
        [&](double en) {
          return std::make_pair(delta_counts(g.a, g.b_plus, en), crossing_oracle(g.a, g.b_plus, en));
        },
        g.energy, scale);
    CHECK(pair.first.delta_plus == pair.second.delta_plus);
    CHECK(pair.first.delta_minus == pair.second.delta_minus);
    // Inertia differences by dense enumeration.
    CHECK(pair.first.delta_plus == n_below(g.a, e) - n_below(g.a + g.b_plus, e));
    CHECK(pair.first.delta_minus == n_below(g.a - g.b_plus, e) - n_below(g.a, e));
  }
}

TEST_CASE("decoupling") {
  const DecouplingReport z =
      check_decoupling(diag({0.0, 10.0}), Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(2, 2), 4.0, 6.0);
  CHECK(z.lhs == 0);
  CHECK(z.rhs() == 0);
  CHECK(z.holds);

  const DecouplingReport d = check_decoupling(diag({0.0, 10.0}), diag({3.0, 0.0}), Eigen::MatrixXd::Zero(2, 2), 4.0, 6.0);
  CHECK(d.lhs == 0);
  CHECK(d.holds);

  CHECK_THROWS_AS(check_decoupling(diag({0.0, 5.0}), diag({1.0, 0.0}), diag({0.0, 0.0}), 4.0, 6.0),
                  HypothesisViolation);

  std::size_t strict = 0;
  for (std::uint64_t i = 0; i < 500; ++i) {
    SplitMix64 rng(23, i);
    const GapInstance g = random_gap_instance(rng);
    const DecouplingReport r = check_decoupling_nudged(g.a, g.b_plus, g.b_minus, g.alpha, g.beta);
    CHECK(r.holds);
    // lhs by dense enumeration of spec(A + B+ - B-).
    const auto ev = spectrum(g.a + g.b_plus - g.b_minus);
    const auto inside = std::count_if(ev.begin(), ev.end(), [&](double x) { return x > r.alpha && x < r.beta; });
    CHECK(r.lhs == static_cast<std::size_t>(inside));
    if (r.strict) ++strict;
  }
  CHECK(strict >= 1);
}

TEST_CASE("crossing commutation") {
  for (std::uint64_t i = 0; i < 200; ++i) {
    SplitMix64 rng(24, i);
    const GapInstance g = random_gap_instance(rng);
    const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(g.a.rows(), g.a.cols());
    const double scale = matrix_scale(g.a) + matrix_scale(g.b_plus) + matrix_scale(g.b_minus);

    const auto [c, e] = with_nudge([&](double en) { return check_crossing_commutation(g.a, g.b_plus, g.b_minus, en); },
                                   g.energy, scale);
    CHECK(c.holds);
    CHECK(c.lhs == static_cast<long>(n_below(g.a, e)) - static_cast<long>(n_below(g.a + g.b_plus - g.b_minus, e)));

    const auto [m, em] = with_nudge([&](double en) { return check_crossing_commutation(g.a, zero, g.b_minus, en); },
                                    g.energy, scale);
    CHECK(m.lhs == -static_cast<long>(delta_counts(g.a, g.b_minus, em).delta_minus));
    CHECK(m.rhs == m.lhs);
    const auto [p, ep] = with_nudge([&](double en) { return check_crossing_commutation(g.a, g.b_plus, zero, en); },
                                    g.energy, scale);
    CHECK(p.lhs == static_cast<long>(delta_counts(g.a, g.b_plus, ep).delta_plus));
    CHECK(p.rhs == p.lhs);
  }
}

TEST_CASE("Ky Fan counting") {
  const CountEquality simple = ky_fan_check(diag({2.0}), diag({2.0}), 0.9, 0.9);
  CHECK(simple.lhs == 1);
  CHECK(simple.rhs == 2);
  CHECK(simple.holds);

  const Eigen::MatrixXd c = diag({1.5, 0.2});
  const CountEquality strict = ky_fan_check(c, Eigen::MatrixXd::Zero(2, 2), 1.0, 1.0);
  CHECK(strict.lhs < strict.rhs);

  SplitMix64 rng(25, 0);
  const Eigen::MatrixXd s = rng.gaussian(5, 5);
  const CountEquality t0 = ky_fan_factored_check(s, Eigen::MatrixXd::Zero(5, 5), 1.0, 1.0);
  CHECK(t0.lhs == static_cast<long>(n_above(s.transpose() * s, 2.0)));
  CHECK(t0.lhs <= static_cast<long>(n_above(s.transpose() * s, 0.5)));
  const CountEquality same = ky_fan_factored_check(s, s, 1.0, 1.0);
  CHECK(same.lhs == static_cast<long>(n_above(4.0 * s.transpose() * s, 2.0)));
  CHECK(same.holds);

  for (std::uint64_t i = 0; i < 500; ++i) {
    SplitMix64 r(26, i);
    const auto n = static_cast<Eigen::Index>(r.between(2, 12));
    const Eigen::MatrixXd cm = random_symmetric(r, n), dm = random_symmetric(r, n);
    const double cc = r.uniform(0.1, 2.0), dd = r.uniform(0.1, 2.0);
    const CountEquality k = ky_fan_check(cm, dm, cc, dd);
    CHECK(k.holds);
    CHECK(k.lhs == static_cast<long>(n_above(cm + dm, cc + dd)));
    const Eigen::MatrixXd sm = r.gaussian(n, n), tm = r.gaussian(n, n);
    CHECK(ky_fan_factored_check(sm, tm, cc, dd).holds);
  }
}

TEST_CASE("Birman-Schwinger principle") {
  const CountEquality zero = bs_principle_check(diag({1.0, 2.0}), Eigen::MatrixXd::Zero(2, 2), 0.0);
  CHECK(zero.lhs == 0);
  CHECK(zero.rhs == 0);
  const CountEquality scalar = bs_principle_check(diag({1.0}), diag({3.0}), -1.0);
  CHECK(scalar.lhs == 1);
  CHECK(scalar.rhs == 1);

  for (std::uint64_t i = 0; i < 500; ++i) {
    SplitMix64 rng(27, i);
    const GapInstance g = random_gap_instance(rng);
    const double e = spectrum(g.a).front() - rng.uniform(0.05, 3.0);
    const auto [r, used] = with_nudge([&](double en) { return bs_principle_check(g.a, g.b_minus, en); }, e,
                                      matrix_scale(g.a) + matrix_scale(g.b_minus));
    CHECK(r.holds);
    CHECK(r.lhs == static_cast<long>(n_below(g.a - g.b_minus, used)));
  }
}
