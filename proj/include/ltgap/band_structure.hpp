#pragma once

// Band structure of periodic problems: Floquet-Bloch decomposition of periodic
// Jacobi matrices with band-edge expansions, the discriminant of periodic 1D
// Schroedinger operators, and finite-difference gap-eigenvalue experiments.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "ltgap/gapset.hpp"
#include "ltgap/lt_bounds.hpp"

namespace ltgap {

/// p x p Floquet matrix: tridiagonal part plus the corner coupling a_{p-1}
/// e^{+-i theta} (solutions obey u_{n+p} = e^{i theta} u_n).
Eigen::MatrixXcd floquet_matrix(const std::vector<double>& period_a,
                                const std::vector<double>& period_b, double theta);

struct BlochData {
  std::size_t period = 0;
  std::vector<double> theta;                            // theta_k = 2 pi k / count
  std::vector<std::vector<double>> bands;               // bands[j][k], ascending in j
  std::vector<std::vector<Eigen::VectorXcd>> vectors;   // vectors[j][k], unit norm on a cell
};

/// theta_count must be even so that theta = 0 and theta = pi are sampled.
BlochData bloch_bands(const std::vector<double>& period_a, const std::vector<double>& period_b,
                      std::size_t theta_count, bool with_vectors = false);

/// Band ranges [min E_j, max E_j] with touching or overlapping ranges merged.
GapSet detect_gaps(const BlochData& bloch, double merge_tolerance = 1e-9);

/// Exact band edges from the periodic (theta = 0) and antiperiodic (theta = pi)
/// spectra.
GapSet periodic_band_set(const std::vector<double>& period_a, const std::vector<double>& period_b,
                         double merge_tolerance = 1e-9);

enum class EdgeSide { TopOfGap, BottomOfGap };

struct HypothesisCheck {
  std::string name;
  bool holds = false;
  std::string detail;
};

struct EdgeExpansion {
  double edge_energy = 0.0;
  EdgeSide side = EdgeSide::TopOfGap;
  std::size_t band = 0;      // index of the band attaining the edge
  double theta0 = 0.0;       // Floquet angle of the edge
  double c1 = 0.0;           // inf (E(k) - b)/k^2 (sign-adjusted for the bottom side)
  double c2 = 0.0;           // sup |u_n(k)|
  double c3 = 0.0;           // sup |v_n(k) - v_n(0)| / k^2
  double c3_linear = 0.0;    // sup |v_n(k) - v_n(0)| / |k|
  double c3_refined = 0.0;   // c3 on the same window with the smallest |k| halved
  double delta = 0.0;        // window half-width in k
  double epsilon = 0.0;      // |E(delta) - b|
  double rho_minus = 0.0, rho_plus = 0.0;
  std::vector<double> k;     // sample points in (0, delta]
  std::vector<double> energy;  // E(k) at the sample points
  std::vector<HypothesisCheck> hypotheses;

  bool all_hold() const;
};

struct EdgeOptions {
  double delta = 0.0;  // 0 selects min(0.3, quarter of the distance to a band crossing)
  std::size_t samples = 64;
};

/// Throws ClosedGap if the gap is not open, DegenerateEdge if c1 < 1e-8.
EdgeExpansion edge_expansion(const std::vector<double>& period_a,
                             const std::vector<double>& period_b, Band gap, EdgeSide side,
                             EdgeOptions options = {});

// Continuum -------------------------------------------------------------------

/// Periodic potential on [0, period), given as a callable with optional interior
/// breakpoints where it may jump.
struct PeriodicPotential {
  std::function<double(double)> value;
  double period = 2.0 * 3.14159265358979323846;
  std::vector<double> breakpoints;
};

struct DiscriminantValue {
  double delta = 0.0;           // trace of the monodromy matrix
  double determinant = 1.0;     // should be 1
  std::size_t steps = 0;        // Magnus steps used on the finest level
};

/// Trace of the one-period transfer matrix of -u'' + V u = E u by the
/// fourth-order Magnus method with step doubling. Throws IntegrationFailure if
/// doubling does not converge to `tolerance`.
DiscriminantValue continuum_discriminant(const PeriodicPotential& v0, double e,
                                         double tolerance = 1e-12);

struct DiscriminantCurve {
  double period_length = 0.0;
  std::vector<double> energy;
  std::vector<double> value;
  double max_determinant_defect = 0.0;
};

DiscriminantCurve discriminant_curve(const PeriodicPotential& v0,
                                     const std::vector<double>& energies, std::size_t jobs = 1);

struct ContinuumBands {
  GapSet bands;
  bool ends_in_band = false;  // scan stopped inside a band (range too small)
  std::size_t evaluations = 0;
};

/// Bands where |Delta| <= 2 inside [e_min, e_max], edges by bisection to 1e-13.
ContinuumBands continuum_band_edges(const PeriodicPotential& v0, double e_min, double e_max,
                                    std::size_t scan_points = 400);

struct ContinuumGapSetup {
  PeriodicPotential v0;
  /// Decaying perturbation: callable, its support and jump locations.
  std::function<double(double)> v;
  double support_lo = 0.0, support_hi = 0.0;
  std::vector<double> v_breakpoints;
  std::size_t gap_index = 0;          // 0 = gap between the first two bands
  std::size_t points_per_period = 64;
  std::size_t periods = 40;           // box is [-periods*L, periods*L]
  double localization_threshold = 1e-6;
};

struct ContinuumGapPoint {
  double lambda = 0.0;
  std::size_t points_per_period = 0;
  std::size_t periods = 0;
  Band gap;                       // gap of the discretized periodic operator
  std::vector<double> eigenvalues;
  double sum = 0.0;
  double norm = 0.0;              // lambda * int |V|
  double ratio = 0.0;
};

struct ContinuumGapReport {
  std::vector<ContinuumGapPoint> base, half_mesh, double_box;
  double sup_ratio = 0.0, median_ratio = 0.0;
  double max_mesh_change = 0.0;   // relative change of the ratio under h -> h/2
  double max_box_change = 0.0;    // relative change under box doubling
  std::vector<double> richardson_orders;  // per eigenvalue at the reference lambda
  double reference_lambda = 0.0;
};

/// Finite-difference spectrum on one box (Dirichlet ends): eigenvalues in the
/// chosen gap with the pollution filter applied.
ContinuumGapPoint continuum_gap_point(const ContinuumGapSetup& setup, double lambda,
                                      std::size_t points_per_period, std::size_t periods);

ContinuumGapReport continuum_gap_experiment(const ContinuumGapSetup& setup,
                                            const std::vector<double>& lambdas,
                                            double reference_lambda, std::size_t jobs = 1);

}  // namespace ltgap
