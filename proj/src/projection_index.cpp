#include "ltgap/projection_index.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ltgap/eigensolve.hpp"
#include "ltgap/errors.hpp"
#include "ltgap/gap_counting.hpp"

namespace ltgap {

namespace {

constexpr double kProjectionTolerance = 1e-10;
constexpr double kUnitTolerance = 1e-8;

Eigen::MatrixXd range_basis(const Eigen::MatrixXd& p) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (p + p.transpose()));
  const Eigen::VectorXd& ev = solver.eigenvalues();
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > 0.5) ++k;
  // Eigenvalues are ascending, so the range is spanned by the last k vectors.
  return solver.eigenvectors().rightCols(k);
}

Eigen::Index numerical_rank(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd& s = svd.singularValues();
  return static_cast<Eigen::Index>((s.array() > kUnitTolerance).count());
}

void require_projection(const Eigen::MatrixXd& p, const char* name) {
  if (p.rows() != p.cols()) throw InvalidArgument(std::string(name) + " is not square");
  const double sym = (p - p.transpose()).cwiseAbs().maxCoeff();
  const double idem = p.size() ? (p * p - p).cwiseAbs().maxCoeff() : 0.0;
  if (sym > kProjectionTolerance || idem > kProjectionTolerance) {
    std::ostringstream os;
    os << name << " is not an orthogonal projection (asymmetry " << sym << ", idempotency defect "
       << idem << ")";
    throw InvalidArgument(os.str());
  }
}

}  // namespace

ProjectionPair::ProjectionPair(Eigen::MatrixXd p, Eigen::MatrixXd q)
    : p_(std::move(p)), q_(std::move(q)) {
  if (p_.rows() != q_.rows()) throw InvalidArgument("projection pair: size mismatch");
  require_projection(p_, "P");
  require_projection(q_, "Q");
}

IndexReport index(const ProjectionPair& pair) {
  const Eigen::MatrixXd& p = pair.p();
  const Eigen::MatrixXd& q = pair.q();
  IndexReport r;
  const Eigen::MatrixXd diff = p - q;
  r.trace = diff.trace();

  const Eigen::VectorXd ev = eig_dense(diff);
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i) - 1.0) < kUnitTolerance) ++r.by_unit_eigenvalues;
    if (std::abs(ev(i) + 1.0) < kUnitTolerance) --r.by_unit_eigenvalues;
  }

  const Eigen::MatrixXd u = range_basis(p);
  const Eigen::MatrixXd w = range_basis(q);
  // ran P cap ker Q = {Ux : QUx = 0}; its dimension is the nullity of QU.
  const Eigen::Index p_in_q_perp = u.cols() - numerical_rank(q * u);
  const Eigen::Index q_in_p_perp = w.cols() - numerical_rank(p * w);
  r.by_intersections = static_cast<long>(p_in_q_perp - q_in_p_perp);

  const Eigen::MatrixXd t = w.transpose() * u;  // QP as a map ran P -> ran Q
  const Eigen::Index rank_t = numerical_rank(t);
  r.by_fredholm = static_cast<long>((u.cols() - rank_t) - (w.cols() - rank_t));

  r.value = r.by_unit_eigenvalues;
  if (r.by_intersections != r.value || r.by_fredholm != r.value) {
    std::ostringstream os;
    os << "index definitions disagree: " << r.by_unit_eigenvalues << ", " << r.by_intersections
       << ", " << r.by_fredholm;
    throw DefinitionMismatch(os.str());
  }
  return r;
}

IndexReport index(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q) {
  return index(ProjectionPair(p, q));
}

AdditivityReport check_additivity(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q,
                                  const Eigen::MatrixXd& r) {
  AdditivityReport out;
  out.pr = index(p, r).value;
  out.pq = index(p, q).value;
  out.qr = index(q, r).value;
  out.holds = out.pr == out.pq + out.qr;
  return out;
}

Eigen::MatrixXd lower_projector(const Eigen::MatrixXd& a, double e) {
  return spectral_projector(a, {-std::numeric_limits<double>::infinity(), e}).matrix;
}

HomotopyReport check_homotopy(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double e,
                              std::vector<double> x_grid) {
  HomotopyReport out;
  if (x_grid.empty()) return out;
  const Eigen::MatrixXd p0 = lower_projector(a, e);
  const double scale = matrix_scale(a) + matrix_scale(b);
  for (double x : x_grid) {
    for (int attempt = 0;; ++attempt) {
      try {
        const Eigen::MatrixXd px = lower_projector(Eigen::MatrixXd(a + x * b), e);
        out.index.push_back(index(px, p0).value);
        out.x.push_back(x);
        break;
      } catch (const SingularShift&) {
        if (attempt > 8) throw;
        x += 1e-6 / (1.0 + scale);
      }
    }
  }
  // Crossing locations from the BS spectrum: A + xB - E is singular exactly when
  // 1 + x mu = 0 for a BS eigenvalue mu, i.e. x* = -1/mu with mu < 0.
  const Eigen::VectorXd mu = eig_dense(bs_matrix(a, b, e).matrix);
  std::vector<double> crossings;
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    if (mu(i) < 0.0) crossings.push_back(-1.0 / mu(i));

  out.holds = true;
  // Before the first grid point: crossings in (0, x_0].
  auto count_in = [&](double lo, double hi) {
    long c = 0;
    for (double xs : crossings)
      if (xs > lo && xs <= hi) ++c;
    return c;
  };
  if (out.index.front() != -count_in(0.0, out.x.front())) out.holds = false;
  for (std::size_t k = 0; k + 1 < out.x.size(); ++k) {
    const long c = count_in(out.x[k], out.x[k + 1]);
    out.crossings.push_back(c);
    if (out.index[k + 1] - out.index[k] != -c) out.holds = false;
  }
  return out;
}

IndexCrossingReport check_index_crossing(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double e) {
  IndexCrossingReport r;
  try {
    const Eigen::MatrixXd p0 = lower_projector(a, e);
    const Eigen::MatrixXd pp = lower_projector(Eigen::MatrixXd(a + b), e);
    const Eigen::MatrixXd pm = lower_projector(Eigen::MatrixXd(a - b), e);
    const CrossingCount d = delta_counts(a, b, e);
    r.index_plus = index(pp, p0).value;
    r.index_minus = index(pm, p0).value;
    r.delta_plus = static_cast<long>(d.delta_plus);
    r.delta_minus = static_cast<long>(d.delta_minus);
  } catch (const SingularShift& s) {
    throw HypothesisViolation(std::string("check_index_crossing: ") + s.what());
  }
  r.holds = r.index_plus == -r.delta_plus && r.index_minus == r.delta_minus;
  return r;
}

Eigen::MatrixXd random_projection(SplitMix64& rng, Eigen::Index n, Eigen::Index k) {
  const Eigen::MatrixXd u = rng.subspace(n, k);
  Eigen::MatrixXd p = u * u.transpose();
  return 0.5 * (p + p.transpose());
}

}  // namespace ltgap
