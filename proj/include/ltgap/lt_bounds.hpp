#pragma once

// Lieb-Thirring sums over eigenvalues outside a band set, the layer-cake
// identity, the trace-class tail bound and empirical constant studies.

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ltgap/eigensolve.hpp"
#include "ltgap/gapset.hpp"
#include "ltgap/jacobi.hpp"

namespace ltgap {

struct LtSumReport {
  double gamma = 0.5;
  double sum = 0.0;
  std::vector<double> eigenvalues;
  std::vector<double> distances;
  double rhs = 0.0;    // perturbation norm the sum is compared against
  double ratio = 0.0;  // sum / rhs (0 when rhs == 0)
  std::string constant_name;
};

/// Sum of dist(e, ess)^gamma over eigenvalues in the (open) region. Throws
/// EigenvalueInBand if some listed eigenvalue is within 1e-10 of a band.
LtSumReport lt_sum(const std::vector<double>& eigenvalues, const GapSet& ess, double gamma,
                   std::optional<Interval> region = std::nullopt);

/// Fraction of the squared norm of v carried by the sites within `fraction` of
/// the artificial ends (the far end only for half-line truncations).
double boundary_weight(const Eigen::VectorXd& v, Extent extent, double fraction = 0.1);

/// Eigenvalues of J in the open region whose eigenvectors are localized away
/// from the artificial ends (boundary weight below `threshold`).
std::vector<double> localized_eigenvalues(const JacobiOperator& j, Interval region,
                                          double threshold = 1e-6);

struct GapSumPoint {
  double lambda = 0.0;
  std::size_t size = 0;
  LtSumReport report;
};

struct GapSumSeries {
  std::vector<GapSumPoint> points;  // ordered by (size, lambda)
  double sup_ratio = 0.0;
  double median_ratio = 0.0;
};

struct GapSumSetup {
  std::vector<double> period_a{1.0};
  std::vector<double> period_b{0.0};
  Extent extent = Extent::HalfLine;
  /// Perturbation shape indexed by lattice site (site 0 is the center of a
  /// whole-line window).
  std::vector<std::pair<long, double>> delta_a;
  std::vector<std::pair<long, double>> delta_b;
  GapSet ess;
  /// Open regions where eigenvalues are collected (typically the gaps and the
  /// two half-lines outside the band set).
  std::vector<Interval> regions;
  double gamma = 0.5;
  std::string constant_name = "periodic-jacobi";
};

JacobiPerturbation perturbation_on(const JacobiOperator& base,
                                   const std::vector<std::pair<long, double>>& delta_a,
                                   const std::vector<std::pair<long, double>>& delta_b);

/// Builds J0 + lambda * pert for every (size, lambda) and collects the localized
/// eigenvalues in the regions together with the LT ratio.
GapSumSeries gap_sum_experiment(const GapSumSetup& setup, const std::vector<double>& lambdas,
                                const std::vector<std::size_t>& sizes, std::size_t jobs = 1);

struct LayerCakeReport {
  double direct = 0.0;         // sum of f(e) over e in [a, b]
  double piecewise = 0.0;      // integral with the counting function integrated exactly
  double quadrature = 0.0;     // same integral by adaptive quadrature per piece
  double quadrature_error = 0.0;
  std::size_t count = 0;
  bool holds = false;
};

/// Sum_{e in [a,b]} f(e) = -int_0^{b-a} f'(b - t) N(J in [a, b - t]) dt, with f(b) = 0.
/// `f_prime_from_top` is t -> f'(b - t). Throws QuadratureFailure if the
/// adaptive integral misses `tolerance`.
LayerCakeReport layer_cake_check(const std::vector<double>& eigenvalues, double a, double b,
                                 const std::function<double(double)>& f,
                                 const std::function<double(double)>& f_prime_from_top,
                                 double tolerance = 1e-8);

struct TailBoundReport {
  double alpha = 0.0;  // min spec(A)
  double lhs = 0.0;    // sum over e <= alpha - 1 of (alpha - e)^{1/2}
  double rhs = 0.0;    // trace |B|
  std::size_t count = 0;
  bool holds = false;
};

TailBoundReport tail_bound_check(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// The gaps of `ess` together with the two half-lines outside it.
std::vector<Interval> complement_regions(const GapSet& ess);

struct ConstantStudyRow {
  double lambda = 0.0;
  double sum = 0.0;
  double norm = 0.0;
  double ratio = 0.0;
  std::size_t count = 0;
};

/// Whole-line free Jacobi matrix on 2*half_width+1 sites minus lambda*V; ratio of
/// sum dist(e, [-2,2])^{1/2} to lambda * sum |V_n|. V is centered on site 0.
std::vector<ConstantStudyRow> critical_constant_study(const std::vector<double>& potential,
                                                      const std::vector<double>& lambdas,
                                                      std::size_t half_width,
                                                      std::size_t jobs = 1);

/// Median of a nonempty list (mean of the two middle values for even sizes).
double median(std::vector<double> values);

}  // namespace ltgap
