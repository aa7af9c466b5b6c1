#pragma once

// One-dimensional Dirac operator D0 + V on a periodic box [0, L), discretized by
// Fourier-Galerkin truncation to modes k = -K..K. D0 acts on mode k as the 2x2
// block [[m, p], [p, -m]] with p = 2 pi k / L; V is a scalar potential acting as
// V times the identity on spinors. The companion scalar operator is
// H0 = sqrt(p^2 + m^2) - m on the same modes.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "ltgap/random.hpp"

namespace ltgap {

/// Potential on [0, L) with the interior points where it (or a derivative) jumps.
struct DiracPotential {
  std::function<double(double)> value;
  std::vector<double> breakpoints;
};

struct DiracConfig {
  double mass = 1.0;
  double box_length = 10.0;
  std::size_t half_modes = 32;  // K; the Galerkin space has 2K + 1 modes per spin
  DiracPotential potential;

  std::size_t modes() const { return 2 * half_modes + 1; }
};

/// V^(n) = (1/L) int_0^L V(x) e^{-2 pi i n x / L} dx for n = -max_n..max_n
/// (entry n + max_n), by Gauss-Legendre panels split at the breakpoints.
std::vector<std::complex<double>> fourier_coefficients(const DiracPotential& v, double length,
                                                       std::size_t max_n);

/// Positive and negative parts V+ = max(V, 0), V- = max(-V, 0) with their sign
/// changes added to the breakpoints.
std::pair<DiracPotential, DiracPotential> potential_parts(const DiracPotential& v, double length);

/// Momenta 2 pi k / L for k = -K..K.
std::vector<double> grid_momenta(const DiracConfig& cfg);

/// 2M x 2M Hermitian matrix of D0 + V (mode-major, spin-minor ordering).
Eigen::MatrixXcd dirac_matrix(const DiracConfig& cfg);

/// M x M Hermitian matrix of H0 - W for the scalar potential W.
Eigen::MatrixXcd scalar_matrix(const DiracConfig& cfg, const DiracPotential& w);

struct GapEigReport {
  std::vector<double> eigenvalues;  // in (-m, m), ascending
  double gamma = 0.0;
  double lhs = 0.0;                 // sum (m - |E_j|)^gamma
  double s_minus = 0.0;             // S_gamma(H0 - V-)
  double s_plus = 0.0;              // S_gamma(H0 - V+)
  std::size_t half_modes = 0;
  double refinement_shift = 0.0;    // max eigenvalue movement under K -> 2K
  bool converged = false;           // refinement_shift <= 1e-6 and counts agree
};

/// Gap eigenvalues of the discretization, with the K -> 2K refinement check
/// unless `refine` is false (then converged stays false and the shift is 0).
GapEigReport dirac_gap_eigs(const DiracConfig& cfg, bool refine = true);

/// (S_gamma(H0 - V-), S_gamma(H0 - V+)), S_gamma = sum |negative eigenvalues|^gamma.
std::pair<double, double> scalar_relativistic_sums(const DiracConfig& cfg, double gamma);

struct ReductionReport {
  double gamma = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;  // 2 (S_gamma(H0 - V-) + S_gamma(H0 - V+))
  double s_minus = 0.0, s_plus = 0.0;
  std::size_t count = 0;
  double slack = 0.0;  // rhs - lhs
  bool holds = false;  // lhs <= rhs + 1e-9
};

/// sum_j (m - |E_j|)^gamma <= 2 [S_gamma(H0 - V-) + S_gamma(H0 - V+)] on the
/// common discretization.
ReductionReport check_reduction(const DiracConfig& cfg, double gamma);

struct SymbolReport {
  double rho = 0.0, mass = 0.0;
  double c1 = 0.0, c2 = 0.0;
  std::size_t grid_points = 0;
  double min_margin_low = 0.0;   // min over |p| <= rho m of (f - c1 p^2/m) / max(f, tiny)
  double min_margin_high = 0.0;  // min over |p| >= rho m of (f - c2 |p|) / f
  double boundary_defect = 0.0;  // |c2 rho m - c1 rho^2 m|
  bool holds = false;
};

/// c1 = (sqrt(rho^2 + 1) - 1)/rho^2 and c2 = (sqrt(rho^2 + 1) - 1)/rho, checked
/// pointwise for f(p) = sqrt(p^2 + m^2) - m on a symmetric grid of `points` momenta.
SymbolReport symbol_inequalities(double rho, double mass = 1.0, std::size_t points = 100000);

struct ResolventComparison {
  double energy = 0.0;
  double min_eig_upper = 0.0;  // lambda_min((H0 + m - E)^{-1} x I + (D0 + E)^{-1})
  double min_eig_lower = 0.0;  // lambda_min((H0 + m - E)^{-1} x I - (D0 - E)^{-1})
  bool holds = false;          // both >= -1e-9
};

/// Matrix form of -(D0 + E)^{-1} <= (H0 + m - E)^{-1} x I and
/// (D0 - E)^{-1} <= (H0 + m - E)^{-1} x I for |E| < m.
ResolventComparison resolvent_comparison(const DiracConfig& cfg, double energy);

/// The scaled problem (t m, t V(t x), L / t); its gap eigenvalues are t E.
DiracConfig scaled_config(const DiracConfig& cfg, double t);

struct WeightRow {
  double mass = 0.0, lambda = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;  // int |V|^{gamma+1} + sqrt(m) int |V|^{gamma+1/2}
  double ratio = 0.0;
  std::size_t count = 0;
  bool converged = false;
};

struct WeightReport {
  double gamma = 0.0;
  std::vector<WeightRow> rows;
  double sup_ratio = 0.0, median_ratio = 0.0;
  bool bounded = false;  // sup <= 10 x median of the nonzero ratios
};

/// Sweep of V = lambda * shape over masses and couplings.
WeightReport weight_bound_sweep(const DiracPotential& shape, const std::vector<double>& masses,
                                const std::vector<double>& lambdas, double gamma,
                                double box_length, std::size_t half_modes, std::size_t jobs = 1);

/// int_0^L |V|^power dx.
double potential_norm(const DiracPotential& v, double length, double power);

/// Random real trigonometric polynomial of degree 1..4 on [0, L) with
/// coefficients of random scale in [0.2, 2].
DiracPotential random_trig_potential(SplitMix64& rng, double length);

/// -lambda on [lo, hi], zero elsewhere.
DiracPotential square_well(double lambda, double lo, double hi);

}  // namespace ltgap
