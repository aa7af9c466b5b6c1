#pragma once

// Jacobi matrices, their perturbations, diagonal potentials and the signed
// splitting of a Jacobi perturbation into two positive semidefinite parts.
//
// Indexing is 0-based throughout: diagonal entry i is b_i, off-diagonal entry i
// (a_i) couples sites i and i+1. A whole-line truncation on {-N, ..., N} stores
// site n at index n + N (see JacobiOperator::index_of_site).

#include <Eigen/Dense>

#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace ltgap {

enum class Extent { HalfLine, WholeLine };

class JacobiPerturbation;

/// Symmetric tridiagonal matrix with arbitrary real entries.
struct SymTridiagonal {
  std::vector<double> diag;
  std::vector<double> off;  // size diag.size() - 1 (or 0 when diag is empty)

  std::size_t size() const noexcept { return diag.size(); }
  Eigen::MatrixXd dense() const;
  /// max|b| + 2 max|a|, an upper bound on the spectral radius.
  double scale() const noexcept;
  double trace() const noexcept;
};

class JacobiOperator {
 public:
  /// Throws InvalidArgument unless every a_n > 0 and
  /// diagonal.size() == off_diagonal.size() + 1 >= 1.
  JacobiOperator(std::vector<double> off_diagonal, std::vector<double> diagonal,
                 Extent extent);

  std::size_t size() const noexcept { return diagonal_.size(); }
  const std::vector<double>& off_diagonal() const noexcept { return off_diagonal_; }
  const std::vector<double>& diagonal() const noexcept { return diagonal_; }
  Extent extent() const noexcept { return extent_; }

  /// Array index of lattice site n. Half-line sites start at 0; whole-line
  /// truncations of odd size 2N+1 are centered on site 0.
  std::size_t index_of_site(long site) const;

  /// l1 norm of the perturbation that produced this operator (0 for bases).
  double perturbation_norm() const noexcept { return perturbation_norm_; }

  SymTridiagonal tridiagonal() const { return {diagonal_, off_diagonal_}; }
  Eigen::MatrixXd dense() const { return tridiagonal().dense(); }

 private:
  friend JacobiOperator apply_perturbation(const JacobiOperator&, const JacobiPerturbation&);

  std::vector<double> off_diagonal_;
  std::vector<double> diagonal_;
  Extent extent_;
  double perturbation_norm_ = 0.0;
};

/// Finitely supported perturbation (delta a_n, delta b_n), stored sparsely by index.
class JacobiPerturbation {
 public:
  JacobiPerturbation() = default;

  JacobiPerturbation& set_a(std::size_t index, double value);
  JacobiPerturbation& set_b(std::size_t index, double value);

  const std::map<std::size_t, double>& delta_a() const noexcept { return delta_a_; }
  const std::map<std::size_t, double>& delta_b() const noexcept { return delta_b_; }

  double a(std::size_t index) const;
  double b(std::size_t index) const;

  /// sum |delta a_n| + sum |delta b_n|
  double l1_norm() const noexcept;
  bool empty() const noexcept { return delta_a_.empty() && delta_b_.empty(); }
  /// Smallest index range [first, last] of sites touched (a_n touches n and n+1).
  std::pair<std::size_t, std::size_t> support() const;

  JacobiPerturbation scaled(double factor) const;
  /// Same perturbation moved `offset` sites to the right.
  JacobiPerturbation shifted(std::size_t offset) const;

  /// Matrix realization on a truncation of the given size.
  SymTridiagonal matrix(std::size_t size) const;

 private:
  std::map<std::size_t, double> delta_a_;
  std::map<std::size_t, double> delta_b_;
};

/// V = V_+ - V_- on lattice sites or grid points.
class DiagonalPotential {
 public:
  explicit DiagonalPotential(std::vector<double> values);

  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double> positive_part() const;
  std::vector<double> negative_part() const;
  double l1_norm() const noexcept;

 private:
  std::vector<double> values_;
};

/// delta J = plus - minus with both parts positive semidefinite.
struct SignedJacobiPair {
  SymTridiagonal plus;
  SymTridiagonal minus;
};

JacobiOperator build_free(std::size_t size, Extent extent);

/// Parameters repeat with the given period; whole-line truncations keep the
/// phase so that site 0 carries period entry 0.
JacobiOperator build_periodic(std::span<const double> period_a, std::span<const double> period_b,
                              std::size_t size, Extent extent = Extent::HalfLine);

/// Throws InvalidArgument when the support leaves the truncation or some
/// resulting a_n <= 0.
JacobiOperator apply_perturbation(const JacobiOperator& base, const JacobiPerturbation& pert);

/// Splitting into two positive semidefinite parts on a truncation of the given size:
///   plus/minus diagonal:  max{0, +-db_n} + |da_{n-1}|/2 + |da_n|/2
///   plus/minus off-diag:  +-da_n / 2
SignedJacobiPair split_signed(const JacobiPerturbation& pert, std::size_t size);

}  // namespace ltgap
