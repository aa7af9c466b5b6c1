#pragma once

// Birman-Schwinger matrices, crossing counts and the decoupling inequalities
// for finite symmetric matrices. All counts are exact integers.

#include <Eigen/Dense>

#include <cstddef>

#include "ltgap/random.hpp"

namespace ltgap {

enum class Side { Plus, Minus };

struct BirmanSchwingerMatrix {
  Eigen::MatrixXd matrix;  // B^{1/2} (A - E)^{-1} B^{1/2}
  double energy = 0.0;
  Side side = Side::Plus;
};

/// delta_+ counts coupling values x in (0,1) with E in spec(A + xB),
/// delta_- the same for A - xB.
struct CrossingCount {
  std::size_t delta_plus = 0;
  std::size_t delta_minus = 0;
  double energy = 0.0;
  Eigen::VectorXd bs_evidence;  // BS eigenvalues (empty for the inertia oracle)
};

struct DecouplingReport {
  double alpha = 0.0, beta = 0.0;
  std::size_t lhs = 0;        // N(A + B+ - B- in (alpha, beta))
  std::size_t rhs_plus = 0;   // N(BS(B+, alpha) < -1)
  std::size_t rhs_minus = 0;  // N(BS(B-, beta) > 1)
  /// Second term of the bound with the cross term: N(B-^{1/2}(A + B+ - beta)^{-1}B-^{1/2} > 1).
  std::size_t cross_term_minus = 0;
  bool holds = false;
  bool strict = false;

  std::size_t rhs() const noexcept { return rhs_plus + rhs_minus; }
  std::size_t cross_term_rhs() const noexcept { return rhs_plus + cross_term_minus; }
};

struct CommutationReport {
  double energy = 0.0;
  long lhs = 0;      // delta_+(A,B+) - delta_-(A+B+,B-)
  long rhs = 0;      // -delta_-(A,B-) + delta_+(A-B-,B+)
  long inertia = 0;  // N(A<E) - N(A+B+-B- < E)
  bool holds = false;
};

struct CountEquality {
  long lhs = 0;
  long rhs = 0;
  bool holds = false;
};

struct RealInequality {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  bool strict = false;
};

/// PSD square root. Throws NotPsd if B has an eigenvalue below -1e-10 (relative
/// to the scale of B); tiny negative eigenvalues are clipped to zero.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& b);

/// Throws SingularShift if E is within the shift tolerance of spec(A), NotPsd
/// if B is not PSD.
BirmanSchwingerMatrix bs_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double e,
                                Side side = Side::Plus);

/// delta_- = #{BS eigenvalues > 1}, delta_+ = #{BS eigenvalues < -1}. Throws
/// SingularShift when a BS eigenvalue is numerically +-1.
CrossingCount delta_counts(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double e);

/// Inertia differences at x = 0 and x = 1, cross-checked by counting
/// eigenvalue crossings of A +- xB over an x grid with x_steps intervals.
/// Throws DefinitionMismatch if the two disagree.
CrossingCount crossing_oracle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double e,
                              int x_steps = 64);

/// Throws HypothesisViolation if [alpha, beta] meets spec(A) or alpha, beta lie
/// on spec(A+B+), spec(A-B-) or spec(A+B+-B-).
DecouplingReport check_decoupling(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b_plus,
                                  const Eigen::MatrixXd& b_minus, double alpha, double beta);

/// check_decoupling with alpha moved up and beta moved down by multiples of
/// 1e-9 * scale until the hypotheses hold.
DecouplingReport check_decoupling_nudged(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b_plus,
                                         const Eigen::MatrixXd& b_minus, double alpha,
                                         double beta, int max_tries = 16);

CommutationReport check_crossing_commutation(const Eigen::MatrixXd& a,
                                             const Eigen::MatrixXd& b_plus,
                                             const Eigen::MatrixXd& b_minus, double e);

/// Four-term decomposition of N(A+B+-B- in (alpha, beta)) through A+B+, with
/// every delta taken from BS spectra; lhs is the direct count.
CountEquality check_four_delta_decomposition(const Eigen::MatrixXd& a,
                                             const Eigen::MatrixXd& b_plus,
                                             const Eigen::MatrixXd& b_minus, double alpha,
                                             double beta);

/// N(C + D > c + d) <= N(C > c) + N(D > d).
CountEquality ky_fan_check(const Eigen::MatrixXd& c_mat, const Eigen::MatrixXd& d_mat, double c,
                           double d);

/// N((S+T)^T (S+T) > c + d) <= N(S^T S > c/2) + N(T^T T > d/2).
CountEquality ky_fan_factored_check(const Eigen::MatrixXd& s, const Eigen::MatrixXd& t, double c,
                                    double d);

/// N(A - B- < E) = N(BS(B-, E) > 1) for E below spec(A).
CountEquality bs_principle_check(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b_minus,
                                 double e);

/// N(C > c) from the dense spectrum (no tolerance handling).
std::size_t count_above(const Eigen::MatrixXd& c, double level);

// Random instances ---------------------------------------------------------

struct GapInstance {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b_plus;
  Eigen::MatrixXd b_minus;
  double gap_lo = 0.0, gap_hi = 0.0;  // planted gap of A
  double alpha = 0.0, beta = 0.0;     // inside the planted gap
  double energy = 0.0;                // single test energy inside the gap
};

/// A = Q^T diag(spectrum with a planted gap) Q with Haar Q; B+- Gram matrices of
/// random rectangular factors.
GapInstance random_gap_instance(SplitMix64& rng, std::size_t min_size = 4,
                                std::size_t max_size = 24);

/// Random symmetric matrix with Gaussian entries scaled by `scale`.
Eigen::MatrixXd random_symmetric(SplitMix64& rng, Eigen::Index n, double scale = 1.0);

/// Gram matrix G^T G of a random rank x n Gaussian factor scaled by `scale`.
Eigen::MatrixXd random_psd(SplitMix64& rng, Eigen::Index n, Eigen::Index rank, double scale);

}  // namespace ltgap
