#include "ltgap/random.hpp"

#include <cmath>
#include <numbers>

namespace ltgap {

double SplitMix64::uniform() noexcept {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double SplitMix64::normal() noexcept {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t SplitMix64::below(std::size_t n) noexcept {
  if (n <= 1) return 0;
  return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
}

Eigen::MatrixXd SplitMix64::gaussian(Eigen::Index rows, Eigen::Index cols) noexcept {
  Eigen::MatrixXd g(rows, cols);
  // Row-major fill order is part of the stream definition.
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) g(i, j) = normal();
  return g;
}

Eigen::MatrixXd SplitMix64::orthogonal(Eigen::Index n) {
  const Eigen::MatrixXd g = gaussian(n, n);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

Eigen::MatrixXd SplitMix64::subspace(Eigen::Index n, Eigen::Index k) {
  if (k == 0) return Eigen::MatrixXd(n, 0);
  const Eigen::MatrixXd g = gaussian(n, k);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
}

}  // namespace ltgap
