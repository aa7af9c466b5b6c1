#pragma once

// Spectral-measure diagnostics for half-line Jacobi matrices that are finitely
// supported perturbations of a periodic background: m-function, a.c. density,
// Szego integrals, logarithmic capacity and the normalized product limit.

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ltgap/gapset.hpp"
#include "ltgap/jacobi.hpp"

namespace ltgap {

/// Half-line parameters: explicit head (sites 0..n0-1), then periodic with site
/// n carrying period entry n mod p (same phase as build_periodic).
struct HalfLineModel {
  std::vector<double> head_a;  // a_0 .. a_{n0-1}
  std::vector<double> head_b;  // b_0 .. b_{n0-1}
  std::vector<double> period_a{1.0};
  std::vector<double> period_b{0.0};

  double a(std::size_t n) const;
  double b(std::size_t n) const;
};

/// Periodic background plus a finitely supported perturbation (0-based indices).
HalfLineModel half_line_model(const std::vector<double>& period_a,
                              const std::vector<double>& period_b,
                              const JacobiPerturbation& pert = {});

/// m(z) = <delta_0, (J - z)^{-1} delta_0> by coefficient stripping from the
/// exact periodic tail. Requires Im z > 0; throws BranchSelectionFailure if the
/// Herglotz root cannot be selected.
std::complex<double> m_function(const HalfLineModel& model, std::complex<double> z);

/// Free-tail convenience: the fixed point (-z + sqrt(z^2 - 4))/2 with Im > 0.
std::complex<double> m_free(std::complex<double> z);

struct SpectralDensity {
  GapSet support;
  std::function<double(double)> evaluate;
  std::vector<double> eta_schedule;  // relative offsets used in the extrapolation
};

/// Density lim Im m(x + i eta)/pi, Richardson-extrapolated from eta0, eta0/2,
/// eta0/4 with eta0 = min(1e-2, 0.01 * distance to the nearest band edge).
double density_at(const HalfLineModel& model, const GapSet& bands, double x);

SpectralDensity spectral_density(const HalfLineModel& model, const GapSet& bands);

/// Free density sqrt(4 - x^2) / (2 pi) on [-2, 2].
double free_density(double x);

struct SzegoResult {
  double value = 0.0;
  std::size_t nodes = 0;     // nodes per subinterval at convergence
  double last_change = 0.0;  // |I_2n - I_n| at convergence
};

/// int w(x) log f(x) dx with w = (4 - x^2)^{-1/2} when the support is exactly
/// [-2, 2] and w = dist(x, R \ support)^{-1/2} otherwise. Gauss-Legendre with
/// node doubling; throws DivergenceSuspected if the Cauchy criterion fails.
SzegoResult szego_integral(const std::function<double(double)>& f, const GapSet& bands,
                           double tolerance = 1e-10, std::size_t max_nodes = 4096);

/// Gauss-Legendre rule on [-1, 1] (cached, thread safe).
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(std::size_t n);

struct CapacityEstimate {
  GapSet gapset;
  double value = 0.0;
  std::string method;  // "fekete" or "periodic-product"
  std::vector<double> fekete_points;  // largest configuration computed
  std::vector<std::size_t> sizes;
  std::vector<double> raw;            // (max product)^{2/(n(n-1))} per size
};

/// Fekete estimate: optimized point configurations for each n in `sizes`, then
/// least-squares extrapolation in n.
CapacityEstimate capacity_fekete(const GapSet& gapset, const std::vector<std::size_t>& sizes);
CapacityEstimate capacity_fekete(const GapSet& gapset, std::size_t n_max = 160);

/// (prod of one period of a_n)^{1/p} for the band set of a periodic Jacobi matrix.
CapacityEstimate capacity_periodic(const std::vector<double>& period_a,
                                   const std::vector<double>& period_b);

/// 1/2 sqrt(b^2 - a^2) for [-b, -a] u [a, b].
double capacity_symmetric_two_intervals(double a, double b);

struct ProductLimitReport {
  std::vector<std::size_t> n;
  std::vector<double> partial;          // P_N = a_0...a_{N-1} / C^N
  std::vector<double> cauchy;           // |P_{2N} - P_N| for N = 1, 2, 4, ...
  double limit = 0.0;                   // P at the largest N
  double min_value = 0.0, max_value = 0.0;
  bool cauchy_decreasing = false;
  bool bounded = false;                 // P_N in (0, inf) bounded away from both
};

ProductLimitReport product_limit_check(const std::function<double(std::size_t)>& a,
                                       double capacity, std::size_t n_max);

struct NevaiReport {
  double lt_sum = 0.0;        // all-gaps sum of dist^{1/2}
  std::size_t eigenvalue_count = 0;
  double product_limit = 0.0;
  double szego = 0.0;
  bool finite = false;
  std::string note;
};

struct NevaiOptions {
  std::size_t truncation = 2001;    // whole-line window for the eigenvalue sum
  std::size_t product_terms = 4096;
};

/// Eigenvalue sum over every gap (and outside the band set), normalized product
/// and Szego integral for a finitely supported perturbation of a periodic
/// background. The perturbation is placed at sites 0.. of the half-line and of
/// the whole-line window.
NevaiReport nevai_pipeline(const std::vector<double>& period_a, const std::vector<double>& period_b,
                           const JacobiPerturbation& pert, NevaiOptions options = {});

}  // namespace ltgap
