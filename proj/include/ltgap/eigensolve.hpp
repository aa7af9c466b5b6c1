#pragma once

// Symmetric eigenvalue machinery: Sturm/inertia counting, bisection, spectral
// projectors, Gauss quadrature from Jacobi matrices and inverse iteration.

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <vector>

#include "ltgap/errors.hpp"
#include "ltgap/jacobi.hpp"

namespace ltgap {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool empty() const noexcept { return !(lo < hi); }
  bool contains(double x) const noexcept { return lo < x && x < hi; }
  double length() const noexcept { return empty() ? 0.0 : hi - lo; }
};

struct CountResult {
  std::size_t count = 0;
  Interval interval;  // (-inf, E) for count_below
  double shift_tolerance = 0.0;
};

struct SpectralProjector {
  Eigen::MatrixXd matrix;
  Interval interval;
  std::size_t rank = 0;
};

struct QuadratureRule {
  std::vector<double> nodes;    // ascending
  std::vector<double> weights;  // squared first components of the eigenvectors
};

/// Relative factor applied to the matrix scale to obtain the default shift tolerance.
inline constexpr double kShiftToleranceFactor = 1e-11;
/// Relative nudge applied by callers after a SingularShift.
inline constexpr double kShiftNudgeFactor = 1e-9;

/// Infinity norm, floored away from zero.
double matrix_scale(const Eigen::MatrixXd& c);

/// Number of eigenvalues strictly below E from the pivot signs of the shifted
/// LDL^T factorization. Throws SingularShift if a pivot is below the tolerance
/// (tolerance <= 0 selects the default 1e-11 * scale).
CountResult count_below(const SymTridiagonal& t, double e, double tolerance = 0.0);
CountResult count_below(const JacobiOperator& j, double e, double tolerance = 0.0);
/// Dense version: counts from the full spectrum; throws SingularShift when an
/// eigenvalue is within the tolerance of E.
CountResult count_below(const Eigen::MatrixXd& c, double e, double tolerance = 0.0);

CountResult count_in_interval(const SymTridiagonal& t, Interval interval, double tolerance = 0.0);
CountResult count_in_interval(const Eigen::MatrixXd& c, Interval interval, double tolerance = 0.0);

/// Sturm count that never throws: tiny pivots are replaced by -pivmin.
std::size_t sturm_count(const SymTridiagonal& t, double e) noexcept;

/// Ascending eigenvalues by bisection, refined to ~1e-12 relative to the matrix
/// scale. With a window only eigenvalues in the open window are returned.
std::vector<double> eig_tridiagonal(const SymTridiagonal& t,
                                    std::optional<Interval> window = std::nullopt);
std::vector<double> eig_tridiagonal(const JacobiOperator& j,
                                    std::optional<Interval> window = std::nullopt);

/// Ascending eigenvalues of a dense symmetric matrix.
Eigen::VectorXd eig_dense(const Eigen::MatrixXd& c);

/// Sum of v v^T over eigenpairs in the interval. Throws SingularShift if an
/// eigenvalue lies within 1e-8 of an endpoint.
SpectralProjector spectral_projector(const Eigen::MatrixXd& c, Interval interval);

/// Gauss quadrature rule of the spectral measure at the first site: all
/// eigenvalues plus squared first eigenvector components (implicit QL that only
/// tracks the first row, O(n^2)).
QuadratureRule tridiagonal_quadrature(const SymTridiagonal& t);

/// Unit eigenvector for an (accurately known) simple eigenvalue, by inverse
/// iteration with a pivoted tridiagonal solve.
Eigen::VectorXd tridiagonal_eigenvector(const SymTridiagonal& t, double eigenvalue);

/// Evaluates f(E) retrying at E +- k*nudge (k = 1, 2, ...) whenever f throws
/// SingularShift. Returns the result together with the energy actually used.
template <class F>
auto with_nudge(F&& f, double e, double scale, int max_tries = 8) {
  const double step = kShiftNudgeFactor * (scale > 0.0 ? scale : 1.0);
  for (int k = 0;; ++k) {
    const double shift = k == 0 ? 0.0 : ((k % 2) ? 1.0 : -1.0) * step * ((k + 1) / 2);
    try {
      auto value = f(e + shift);
      return std::make_pair(value, e + shift);
    } catch (const SingularShift&) {
      if (k >= 2 * max_tries) throw;
    }
  }
}

}  // namespace ltgap
