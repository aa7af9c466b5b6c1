#pragma once

// Reference implementations that share no code with the library's solvers.
// Plain and slow; used as cross-checks in the tests and the acceptance
// battery.

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace ltgap::oracle {

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
std::vector<double> jacobi_rotation_eigenvalues(Eigen::MatrixXd a, double tolerance = 1e-14,
                                                int max_sweeps = 100);

/// Inverse by Gauss-Jordan elimination with partial pivoting.
Eigen::MatrixXd gauss_jordan_inverse(const Eigen::MatrixXd& a);

/// Number of listed eigenvalues strictly below e.
std::size_t count_below(const std::vector<double>& eigenvalues, double e);

/// Trace of the one-period transfer matrix of -u'' + V u = E u by classical RK4
/// with a fixed number of steps.
double rk4_discriminant(const std::function<double(double)>& v, double period, double e,
                        std::size_t steps = 20000);

/// Root of g on [lo, hi] by plain bisection (g(lo) and g(hi) of opposite sign).
double bisect(const std::function<double(double)>& g, double lo, double hi, double tolerance = 1e-13);

/// Band set [E_0, E_1] u [E_2, E_3] u ... of a periodic Schroedinger operator from
/// a scan of the RK4 discriminant on [e_min, e_max].
std::vector<std::pair<double, double>> rk4_bands(const std::function<double(double)>& v,
                                                 double period, double e_min, double e_max,
                                                 std::size_t scan = 600);

/// Spectral measure of delta_0 for a symmetric tridiagonal matrix: eigenvalues
/// and squared first components (Gauss quadrature nodes and weights).
std::pair<std::vector<double>, std::vector<double>> tridiagonal_measure(
    const std::vector<double>& diag, const std::vector<double>& off);

/// sum_j w_j K_sigma(x - e_j) with the Gaussian kernel of width sigma.
double smoothed_measure(const std::vector<double>& nodes, const std::vector<double>& weights,
                        double x, double sigma);

}  // namespace ltgap::oracle
