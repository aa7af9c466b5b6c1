#include "ltgap/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ltgap/errors.hpp"

namespace ltgap {

Eigen::MatrixXd SymTridiagonal::dense() const {
  const auto n = static_cast<Eigen::Index>(diag.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(i, i) = diag[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    m(i, i + 1) = off[static_cast<std::size_t>(i)];
    m(i + 1, i) = off[static_cast<std::size_t>(i)];
  }
  return m;
}

double SymTridiagonal::scale() const noexcept {
  double bmax = 0.0, amax = 0.0;
  for (double b : diag) bmax = std::max(bmax, std::abs(b));
  for (double a : off) amax = std::max(amax, std::abs(a));
  return std::max(bmax + 2.0 * amax, 1e-300);
}

double SymTridiagonal::trace() const noexcept {
  double t = 0.0;
  for (double b : diag) t += b;
  return t;
}

JacobiOperator::JacobiOperator(std::vector<double> off_diagonal, std::vector<double> diagonal,
                               Extent extent)
    : off_diagonal_(std::move(off_diagonal)), diagonal_(std::move(diagonal)), extent_(extent) {
  if (diagonal_.empty()) throw InvalidArgument("Jacobi operator needs size >= 1");
  if (off_diagonal_.size() + 1 != diagonal_.size())
    throw InvalidArgument("Jacobi operator: off-diagonal length must be size - 1");
  for (std::size_t i = 0; i < off_diagonal_.size(); ++i) {
    if (!(off_diagonal_[i] > 0.0)) {
      std::ostringstream os;
      os << "Jacobi operator: a_" << i << " = " << off_diagonal_[i] << " is not positive";
      throw InvalidArgument(os.str());
    }
  }
}

std::size_t JacobiOperator::index_of_site(long site) const {
  long index = site;
  if (extent_ == Extent::WholeLine) index = site + static_cast<long>(size() / 2);
  if (index < 0 || index >= static_cast<long>(size()))
    throw InvalidArgument("site outside the truncation window");
  return static_cast<std::size_t>(index);
}

JacobiPerturbation& JacobiPerturbation::set_a(std::size_t index, double value) {
  if (value == 0.0)
    delta_a_.erase(index);
  else
    delta_a_[index] = value;
  return *this;
}

JacobiPerturbation& JacobiPerturbation::set_b(std::size_t index, double value) {
  if (value == 0.0)
    delta_b_.erase(index);
  else
    delta_b_[index] = value;
  return *this;
}

double JacobiPerturbation::a(std::size_t index) const {
  auto it = delta_a_.find(index);
  return it == delta_a_.end() ? 0.0 : it->second;
}

double JacobiPerturbation::b(std::size_t index) const {
  auto it = delta_b_.find(index);
  return it == delta_b_.end() ? 0.0 : it->second;
}

double JacobiPerturbation::l1_norm() const noexcept {
  double s = 0.0;
  for (const auto& [i, v] : delta_a_) s += std::abs(v);
  for (const auto& [i, v] : delta_b_) s += std::abs(v);
  return s;
}

std::pair<std::size_t, std::size_t> JacobiPerturbation::support() const {
  if (empty()) return {0, 0};
  std::size_t lo = static_cast<std::size_t>(-1), hi = 0;
  for (const auto& [i, v] : delta_b_) {
    lo = std::min(lo, i);
    hi = std::max(hi, i);
  }
  for (const auto& [i, v] : delta_a_) {
    lo = std::min(lo, i);
    hi = std::max(hi, i + 1);
  }
  return {lo, hi};
}

JacobiPerturbation JacobiPerturbation::scaled(double factor) const {
  JacobiPerturbation out;
  if (factor == 0.0) return out;
  for (const auto& [i, v] : delta_a_) out.delta_a_[i] = factor * v;
  for (const auto& [i, v] : delta_b_) out.delta_b_[i] = factor * v;
  return out;
}

JacobiPerturbation JacobiPerturbation::shifted(std::size_t offset) const {
  JacobiPerturbation out;
  for (const auto& [i, v] : delta_a_) out.delta_a_[i + offset] = v;
  for (const auto& [i, v] : delta_b_) out.delta_b_[i + offset] = v;
  return out;
}

SymTridiagonal JacobiPerturbation::matrix(std::size_t size) const {
  if (!empty() && support().second >= size)
    throw InvalidArgument("perturbation support exceeds the truncation");
  SymTridiagonal m{std::vector<double>(size, 0.0),
                   std::vector<double>(size > 0 ? size - 1 : 0, 0.0)};
  for (const auto& [i, v] : delta_b_) m.diag[i] = v;
  for (const auto& [i, v] : delta_a_) m.off[i] = v;
  return m;
}

DiagonalPotential::DiagonalPotential(std::vector<double> values) : values_(std::move(values)) {}

std::vector<double> DiagonalPotential::positive_part() const {
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(),
                 [](double v) { return v > 0.0 ? v : 0.0; });
  return out;
}

std::vector<double> DiagonalPotential::negative_part() const {
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(),
                 [](double v) { return v < 0.0 ? -v : 0.0; });
  return out;
}

double DiagonalPotential::l1_norm() const noexcept {
  double s = 0.0;
  for (double v : values_) s += std::abs(v);
  return s;
}

JacobiOperator build_free(std::size_t size, Extent extent) {
  if (size == 0) throw InvalidArgument("build_free: size must be >= 1");
  return JacobiOperator(std::vector<double>(size - 1, 1.0), std::vector<double>(size, 0.0), extent);
}

JacobiOperator build_periodic(std::span<const double> period_a, std::span<const double> period_b,
                              std::size_t size, Extent extent) {
  if (size == 0) throw InvalidArgument("build_periodic: size must be >= 1");
  if (period_a.empty() || period_a.size() != period_b.size())
    throw InvalidArgument("build_periodic: period lengths must be equal and nonzero");
  for (double a : period_a)
    if (!(a > 0.0)) throw InvalidArgument("build_periodic: nonpositive a in the period");
  const std::size_t p = period_a.size();
  // Whole-line windows are centered on site 0, which carries period entry 0.
  const std::size_t origin = extent == Extent::WholeLine ? size / 2 : 0;
  const std::size_t phase = (p - origin % p) % p;
  std::vector<double> a(size - 1), b(size);
  for (std::size_t i = 0; i < size; ++i) b[i] = period_b[(i + phase) % p];
  for (std::size_t i = 0; i + 1 < size; ++i) a[i] = period_a[(i + phase) % p];
  return JacobiOperator(std::move(a), std::move(b), extent);
}

JacobiOperator apply_perturbation(const JacobiOperator& base, const JacobiPerturbation& pert) {
  const std::size_t n = base.size();
  if (!pert.empty() && pert.support().second >= n)
    throw InvalidArgument("apply_perturbation: support exceeds the truncation");
  std::vector<double> a = base.off_diagonal();
  std::vector<double> b = base.diagonal();
  for (const auto& [i, v] : pert.delta_b()) b[i] += v;
  for (const auto& [i, v] : pert.delta_a()) {
    a[i] += v;
    if (!(a[i] > 0.0)) {
      std::ostringstream os;
      os << "apply_perturbation: a_" << i << " becomes " << a[i] << " (not a Jacobi matrix)";
      throw InvalidArgument(os.str());
    }
  }
  JacobiOperator out(std::move(a), std::move(b), base.extent());
  out.perturbation_norm_ = base.perturbation_norm() + pert.l1_norm();
  return out;
}

SignedJacobiPair split_signed(const JacobiPerturbation& pert, std::size_t size) {
  if (!pert.empty() && pert.support().second >= size)
    throw InvalidArgument("split_signed: support exceeds the truncation");
  SignedJacobiPair out{
      {std::vector<double>(size, 0.0), std::vector<double>(size > 0 ? size - 1 : 0, 0.0)},
      {std::vector<double>(size, 0.0), std::vector<double>(size > 0 ? size - 1 : 0, 0.0)}};
  for (const auto& [i, v] : pert.delta_b()) {
    out.plus.diag[i] += std::max(0.0, v);
    out.minus.diag[i] += std::max(0.0, -v);
  }
  for (const auto& [i, v] : pert.delta_a()) {
    const double h = 0.5 * std::abs(v);
    out.plus.diag[i] += h;
    out.plus.diag[i + 1] += h;
    out.minus.diag[i] += h;
    out.minus.diag[i + 1] += h;
    out.plus.off[i] = 0.5 * v;
    out.minus.off[i] = -0.5 * v;
  }
  return out;
}

}  // namespace ltgap
