#pragma once

// Relative index of a pair of orthogonal projections in finite dimension.

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

#include "ltgap/random.hpp"

namespace ltgap {

/// Validated pair of symmetric idempotents of equal size (tolerance 1e-10).
class ProjectionPair {
 public:
  ProjectionPair(Eigen::MatrixXd p, Eigen::MatrixXd q);
  const Eigen::MatrixXd& p() const noexcept { return p_; }
  const Eigen::MatrixXd& q() const noexcept { return q_; }

 private:
  Eigen::MatrixXd p_, q_;
};

struct IndexReport {
  long by_unit_eigenvalues = 0;  // dim ker(P-Q-1) - dim ker(Q-P-1)
  long by_intersections = 0;     // dim(ran P cap ran Q^perp) - dim(ran Q cap ran P^perp)
  long by_fredholm = 0;          // dim ker - codim ran of QP : ran P -> ran Q
  double trace = 0.0;            // trace(P - Q)
  long value = 0;
};

/// Computes the three definitions; throws DefinitionMismatch unless they agree.
IndexReport index(const ProjectionPair& pair);
IndexReport index(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q);

struct AdditivityReport {
  long pr = 0, pq = 0, qr = 0;
  bool holds = false;
};

AdditivityReport check_additivity(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q,
                                  const Eigen::MatrixXd& r);

/// P_{(-inf, E)}(A). Throws SingularShift if E is within 1e-8 of spec(A).
Eigen::MatrixXd lower_projector(const Eigen::MatrixXd& a, double e);

struct HomotopyReport {
  std::vector<double> x;      // grid actually used (points nudged off crossings)
  std::vector<long> index;    // idx(P(A + xB), P(A)) per grid point
  std::vector<long> crossings;  // per grid interval, from BS eigenvalues x* = -1/mu
  bool holds = false;         // every jump equals minus the crossings in its interval
};

HomotopyReport check_homotopy(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double e,
                              std::vector<double> x_grid);

struct IndexCrossingReport {
  long index_plus = 0;   // idx(P(A+B), P(A))
  long delta_plus = 0;
  long index_minus = 0;  // idx(P(A-B), P(A))
  long delta_minus = 0;
  bool holds = false;
};

/// idx(P(A+B), P(A)) = -delta_+ and idx(P(A-B), P(A)) = delta_-.
/// Throws HypothesisViolation if E lies on spec(A), spec(A+B) or spec(A-B).
IndexCrossingReport check_index_crossing(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double e);

/// Orthogonal projection onto a uniformly random k-dimensional subspace.
Eigen::MatrixXd random_projection(SplitMix64& rng, Eigen::Index n, Eigen::Index k);

}  // namespace ltgap
