#include "ltgap/gap_counting.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ltgap/eigensolve.hpp"
#include "ltgap/errors.hpp"

namespace ltgap {

namespace {

constexpr double kBsUnitTolerance = 1e-10;

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

std::size_t count_below_or_violation(const Eigen::MatrixXd& c, double e, const char* what) {
  try {
    return count_below(c, e).count;
  } catch (const SingularShift&) {
    std::ostringstream os;
    os.precision(17);
    os << "energy " << e << " lies on spec(" << what << ")";
    throw HypothesisViolation(os.str());
  }
}

}  // namespace

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& b) {
  const auto n = b.rows();
  if (n == 0) return b;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetrize(b));
  const Eigen::VectorXd& ev = solver.eigenvalues();
  const double tol = 1e-10 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  if (ev(0) < -tol) {
    std::ostringstream os;
    os << "matrix is not positive semidefinite (smallest eigenvalue " << ev(0) << ")";
    throw NotPsd(os.str());
  }
  const Eigen::VectorXd root = ev.cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd& v = solver.eigenvectors();
  return symmetrize(v * root.asDiagonal() * v.transpose());
}

BirmanSchwingerMatrix bs_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double e,
                                Side side) {
  if (a.rows() != a.cols() || b.rows() != a.rows() || b.cols() != a.cols())
    throw InvalidArgument("bs_matrix: dimension mismatch");
  const Eigen::MatrixXd root = psd_sqrt(b);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetrize(a));
  const Eigen::VectorXd& ev = solver.eigenvalues();
  const double tol = kShiftToleranceFactor * matrix_scale(a);
  Eigen::VectorXd inv(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i) - e) < tol) {
      std::ostringstream os;
      os.precision(17);
      os << "bs_matrix: energy " << e << " lies on spec(A)";
      throw SingularShift(os.str(), e);
    }
    inv(i) = 1.0 / (ev(i) - e);
  }
  const Eigen::MatrixXd w = root * solver.eigenvectors();
  return {symmetrize(w * inv.asDiagonal() * w.transpose()), e, side};
}

CrossingCount delta_counts(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double e) {
  const auto bs = bs_matrix(a, b, e);
  CrossingCount out;
  out.energy = e;
  out.bs_evidence = eig_dense(bs.matrix);
  for (Eigen::Index i = 0; i < out.bs_evidence.size(); ++i) {
    const double mu = out.bs_evidence(i);
    if (std::abs(mu - 1.0) < kBsUnitTolerance || std::abs(mu + 1.0) < kBsUnitTolerance) {
      std::ostringstream os;
      os.precision(17);
      os << "delta_counts: Birman-Schwinger eigenvalue " << mu << " is numerically +-1";
      throw SingularShift(os.str(), e);
    }
    if (mu > 1.0) ++out.delta_minus;
    if (mu < -1.0) ++out.delta_plus;
  }
  return out;
}

CrossingCount crossing_oracle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double e,
                              int x_steps) {
  if (x_steps < 1) throw InvalidArgument("crossing_oracle: x_steps must be >= 1");
  psd_sqrt(b);  // PSD validation
  const std::size_t n0 = count_below(a, e).count;
  const std::size_t n_plus = count_below(Eigen::MatrixXd(a + b), e).count;
  const std::size_t n_minus = count_below(Eigen::MatrixXd(a - b), e).count;
  if (n_plus > n0 || n_minus < n0)
    throw DefinitionMismatch("crossing_oracle: counts are not monotone in the coupling");

  // Grid continuation: N(A + xB < E) must be nonincreasing and N(A - xB < E)
  // nondecreasing in x.
  const double scale = matrix_scale(a) + matrix_scale(b);
  for (int sign : {+1, -1}) {
    std::size_t prev = n0;
    for (int k = 1; k < x_steps; ++k) {
      double x = static_cast<double>(k) / x_steps;
      std::size_t cur = 0;
      for (int attempt = 0;; ++attempt) {
        try {
          cur = count_below(Eigen::MatrixXd(a + sign * x * b), e).count;
          break;
        } catch (const SingularShift&) {
          if (attempt > 8) throw;
          x += 1e-7 / (1.0 + scale);
        }
      }
      if ((sign > 0 && cur > prev) || (sign < 0 && cur < prev))
        throw DefinitionMismatch("crossing_oracle: eigenvalue flow is not monotone");
      prev = cur;
    }
    const std::size_t end = sign > 0 ? n_plus : n_minus;
    if ((sign > 0 && end > prev) || (sign < 0 && end < prev))
      throw DefinitionMismatch("crossing_oracle: eigenvalue flow is not monotone");
  }
  CrossingCount out;
  out.energy = e;
  out.delta_plus = n0 - n_plus;
  out.delta_minus = n_minus - n0;
  return out;
}

DecouplingReport check_decoupling(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b_plus,
                                  const Eigen::MatrixXd& b_minus, double alpha, double beta) {
  if (!(alpha < beta)) throw InvalidArgument("check_decoupling: need alpha < beta");
  const Eigen::VectorXd ev = eig_dense(a);
  const double tol = kShiftToleranceFactor * matrix_scale(a);
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > alpha - tol && ev(i) < beta + tol)
      throw HypothesisViolation("check_decoupling: [alpha, beta] meets spec(A)");

  const Eigen::MatrixXd ap = a + b_plus;
  const Eigen::MatrixXd am = a - b_minus;
  const Eigen::MatrixXd full = a + b_plus - b_minus;
  for (double e : {alpha, beta}) {
    count_below_or_violation(ap, e, "A+B+");
    count_below_or_violation(am, e, "A-B-");
  }
  const std::size_t below_beta = count_below_or_violation(full, beta, "A+B+-B-");
  const std::size_t below_alpha = count_below_or_violation(full, alpha, "A+B+-B-");

  DecouplingReport r;
  r.alpha = alpha;
  r.beta = beta;
  r.lhs = below_beta - below_alpha;
  try {
    r.rhs_plus = delta_counts(a, b_plus, alpha).delta_plus;
    r.rhs_minus = delta_counts(a, b_minus, beta).delta_minus;
    r.cross_term_minus = delta_counts(ap, b_minus, beta).delta_minus;
  } catch (const SingularShift& s) {
    throw HypothesisViolation(std::string("check_decoupling: ") + s.what());
  }
  r.holds = r.lhs <= r.rhs();
  r.strict = r.lhs < r.rhs();
  return r;
}

DecouplingReport check_decoupling_nudged(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b_plus,
                                         const Eigen::MatrixXd& b_minus, double alpha,
                                         double beta, int max_tries) {
  const double step =
      kShiftNudgeFactor * (matrix_scale(a) + matrix_scale(b_plus) + matrix_scale(b_minus));
  for (int k = 0;; ++k) {
    try {
      return check_decoupling(a, b_plus, b_minus, alpha + k * step, beta - k * step);
    } catch (const HypothesisViolation&) {
      if (k >= max_tries) throw;
    }
  }
}

CommutationReport check_crossing_commutation(const Eigen::MatrixXd& a,
                                             const Eigen::MatrixXd& b_plus,
                                             const Eigen::MatrixXd& b_minus, double e) {
  const Eigen::MatrixXd ap = a + b_plus;
  const Eigen::MatrixXd am = a - b_minus;
  const Eigen::MatrixXd full = a + b_plus - b_minus;
  CommutationReport r;
  r.energy = e;
  try {
    const std::size_t n0 = count_below(a, e).count;
    const std::size_t nf = count_below(full, e).count;
    count_below(ap, e);
    count_below(am, e);
    r.lhs = static_cast<long>(delta_counts(a, b_plus, e).delta_plus) -
            static_cast<long>(delta_counts(ap, b_minus, e).delta_minus);
    r.rhs = -static_cast<long>(delta_counts(a, b_minus, e).delta_minus) +
            static_cast<long>(delta_counts(am, b_plus, e).delta_plus);
    r.inertia = static_cast<long>(n0) - static_cast<long>(nf);
  } catch (const SingularShift& s) {
    throw HypothesisViolation(std::string("check_crossing_commutation: ") + s.what());
  }
  r.holds = r.lhs == r.rhs && r.lhs == r.inertia;
  return r;
}

CountEquality check_four_delta_decomposition(const Eigen::MatrixXd& a,
                                             const Eigen::MatrixXd& b_plus,
                                             const Eigen::MatrixXd& b_minus, double alpha,
                                             double beta) {
  const Eigen::MatrixXd ap = a + b_plus;
  const Eigen::MatrixXd full = ap - b_minus;
  CountEquality r;
  try {
    r.lhs = static_cast<long>(count_in_interval(full, {alpha, beta}).count);
    const auto pa = delta_counts(a, b_plus, alpha);
    const auto pb = delta_counts(a, b_plus, beta);
    const auto ma = delta_counts(ap, b_minus, alpha);
    const auto mb = delta_counts(ap, b_minus, beta);
    r.rhs = static_cast<long>(pa.delta_plus) - static_cast<long>(pb.delta_plus) +
            static_cast<long>(mb.delta_minus) - static_cast<long>(ma.delta_minus);
    // The formula presumes no eigenvalue of A in (alpha, beta).
    r.rhs += static_cast<long>(count_in_interval(a, {alpha, beta}).count);
  } catch (const SingularShift& s) {
    throw HypothesisViolation(std::string("four-delta decomposition: ") + s.what());
  }
  r.holds = r.lhs == r.rhs;
  return r;
}

std::size_t count_above(const Eigen::MatrixXd& c, double level) {
  const Eigen::VectorXd ev = eig_dense(c);
  return static_cast<std::size_t>((ev.array() > level).count());
}

CountEquality ky_fan_check(const Eigen::MatrixXd& c_mat, const Eigen::MatrixXd& d_mat, double c,
                           double d) {
  if (!(c > 0.0) || !(d > 0.0)) throw InvalidArgument("ky_fan_check: c, d must be positive");
  CountEquality r;
  r.lhs = static_cast<long>(count_above(Eigen::MatrixXd(c_mat + d_mat), c + d));
  r.rhs = static_cast<long>(count_above(c_mat, c) + count_above(d_mat, d));
  r.holds = r.lhs <= r.rhs;
  return r;
}

CountEquality ky_fan_factored_check(const Eigen::MatrixXd& s, const Eigen::MatrixXd& t, double c,
                                    double d) {
  if (!(c > 0.0) || !(d > 0.0))
    throw InvalidArgument("ky_fan_factored_check: c, d must be positive");
  if (s.rows() != t.rows() || s.cols() != t.cols())
    throw InvalidArgument("ky_fan_factored_check: dimension mismatch");
  const Eigen::MatrixXd sum = s + t;
  CountEquality r;
  r.lhs = static_cast<long>(count_above(Eigen::MatrixXd(sum.transpose() * sum), c + d));
  r.rhs = static_cast<long>(count_above(Eigen::MatrixXd(s.transpose() * s), 0.5 * c) +
                            count_above(Eigen::MatrixXd(t.transpose() * t), 0.5 * d));
  r.holds = r.lhs <= r.rhs;
  return r;
}

CountEquality bs_principle_check(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b_minus,
                                 double e) {
  const Eigen::VectorXd ev = eig_dense(a);
  if (ev.size() > 0 && !(e < ev(0)))
    throw HypothesisViolation("bs_principle_check: E must lie below spec(A)");
  CountEquality r;
  r.lhs = static_cast<long>(count_below(Eigen::MatrixXd(a - b_minus), e).count);
  r.rhs = static_cast<long>(delta_counts(a, b_minus, e).delta_minus);
  r.holds = r.lhs == r.rhs;
  return r;
}

Eigen::MatrixXd random_symmetric(SplitMix64& rng, Eigen::Index n, double scale) {
  const Eigen::MatrixXd g = rng.gaussian(n, n);
  return scale * symmetrize(g);
}

Eigen::MatrixXd random_psd(SplitMix64& rng, Eigen::Index n, Eigen::Index rank, double scale) {
  const Eigen::MatrixXd g = scale * rng.gaussian(rank, n);
  return symmetrize(g.transpose() * g);
}

GapInstance random_gap_instance(SplitMix64& rng, std::size_t min_size, std::size_t max_size) {
  const auto n = static_cast<Eigen::Index>(rng.between(min_size, max_size));
  GapInstance g;
  const double center = rng.uniform(-2.0, 2.0);
  const double half = rng.uniform(0.5, 1.5);
  g.gap_lo = center - half;
  g.gap_hi = center + half;
  constexpr double lo = -6.0, hi = 6.0;
  const double left_len = g.gap_lo - lo;
  const double right_len = hi - g.gap_hi;
  Eigen::VectorXd spectrum(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = rng.uniform() * (left_len + right_len);
    spectrum(i) = u < left_len ? lo + u : g.gap_hi + (u - left_len);
  }
  const Eigen::MatrixXd q = rng.orthogonal(n);
  g.a = symmetrize(q * spectrum.asDiagonal() * q.transpose());

  auto psd = [&](void) {
    const auto rank = static_cast<Eigen::Index>(rng.between(1, static_cast<std::size_t>(n)));
    const double target = rng.uniform(0.5, 8.0);
    const double s = std::sqrt(target) / (std::sqrt(double(rank)) + std::sqrt(double(n)));
    return random_psd(rng, n, rank, s);
  };
  g.b_plus = psd();
  g.b_minus = psd();

  const double width = g.gap_hi - g.gap_lo;
  g.alpha = g.gap_lo + 0.45 * width * rng.uniform();
  g.beta = g.gap_hi - 0.45 * width * rng.uniform();
  g.energy = rng.uniform(g.alpha, g.beta);
  return g;
}

}  // namespace ltgap
