#include "ltgap/lt_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "ltgap/errors.hpp"
#include "ltgap/parallel.hpp"

namespace ltgap {

LtSumReport lt_sum(const std::vector<double>& eigenvalues, const GapSet& ess, double gamma,
                   std::optional<Interval> region) {
  if (gamma < 0.0) throw InvalidArgument("lt_sum: gamma must be nonnegative");
  LtSumReport r;
  r.gamma = gamma;
  for (double e : eigenvalues) {
    if (region && !region->contains(e)) continue;
    if (ess.in_band(e, 1e-10)) {
      std::ostringstream os;
      os.precision(17);
      os << "lt_sum: eigenvalue " << e << " lies in " << ess.to_string();
      throw EigenvalueInBand(os.str());
    }
    const double d = ess.distance(e);
    r.eigenvalues.push_back(e);
    r.distances.push_back(d);
    r.sum += std::pow(d, gamma);
  }
  return r;
}

double boundary_weight(const Eigen::VectorXd& v, Extent extent, double fraction) {
  const auto n = v.size();
  if (n == 0) return 0.0;
  const auto width = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(fraction * n));
  double w = v.tail(width).squaredNorm();
  if (extent == Extent::WholeLine) w += v.head(width).squaredNorm();
  return w / v.squaredNorm();
}

std::vector<double> localized_eigenvalues(const JacobiOperator& j, Interval region,
                                          double threshold) {
  const SymTridiagonal t = j.tridiagonal();
  std::vector<double> out;
  for (double e : eig_tridiagonal(t, region)) {
    const Eigen::VectorXd v = tridiagonal_eigenvector(t, e);
    if (boundary_weight(v, j.extent()) < threshold) out.push_back(e);
  }
  return out;
}

JacobiPerturbation perturbation_on(const JacobiOperator& base,
                                   const std::vector<std::pair<long, double>>& delta_a,
                                   const std::vector<std::pair<long, double>>& delta_b) {
  JacobiPerturbation p;
  for (const auto& [site, v] : delta_a) p.set_a(base.index_of_site(site), v);
  for (const auto& [site, v] : delta_b) p.set_b(base.index_of_site(site), v);
  return p;
}

double median(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

GapSumSeries gap_sum_experiment(const GapSumSetup& setup, const std::vector<double>& lambdas,
                                const std::vector<std::size_t>& sizes, std::size_t jobs) {
  struct Task {
    std::size_t size;
    double lambda;
  };
  std::vector<Task> tasks;
  for (std::size_t n : sizes)
    for (double l : lambdas) tasks.push_back({n, l});

  GapSumSeries series;
  series.points = parallel_map(tasks.size(), jobs, [&](std::size_t i) {
    const Task& task = tasks[i];
    const JacobiOperator base =
        build_periodic(setup.period_a, setup.period_b, task.size, setup.extent);
    const JacobiPerturbation shape = perturbation_on(base, setup.delta_a, setup.delta_b);
    const JacobiOperator j = apply_perturbation(base, shape.scaled(task.lambda));
    GapSumPoint p;
    p.lambda = task.lambda;
    p.size = task.size;
    std::vector<double> eigs;
    for (const Interval& region : setup.regions) {
      const auto found = localized_eigenvalues(j, region);
      eigs.insert(eigs.end(), found.begin(), found.end());
    }
    p.report = lt_sum(eigs, setup.ess, setup.gamma);
    p.report.rhs = std::abs(task.lambda) * shape.l1_norm();
    p.report.ratio = p.report.rhs > 0.0 ? p.report.sum / p.report.rhs : 0.0;
    p.report.constant_name = setup.constant_name;
    return p;
  });
  std::vector<double> ratios;
  for (const auto& p : series.points) {
    series.sup_ratio = std::max(series.sup_ratio, p.report.ratio);
    ratios.push_back(p.report.ratio);
  }
  if (!ratios.empty()) series.median_ratio = median(ratios);
  return series;
}

std::vector<Interval> complement_regions(const GapSet& ess) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<Interval> out{{-inf, ess.lower()}};
  for (const Band& g : ess.gaps()) out.push_back({g.lo, g.hi});
  out.push_back({ess.upper(), inf});
  return out;
}

LayerCakeReport layer_cake_check(const std::vector<double>& eigenvalues, double a, double b,
                                 const std::function<double(double)>& f,
                                 const std::function<double(double)>& f_prime_from_top,
                                 double tolerance) {
  if (!(a < b)) throw InvalidArgument("layer_cake_check: need a < b");
  if (std::abs(f(b)) > 1e-14) throw InvalidArgument("layer_cake_check: f(b) must vanish");
  LayerCakeReport r;
  std::vector<double> inside;
  for (double e : eigenvalues)
    if (e >= a && e <= b) inside.push_back(e);
  std::sort(inside.begin(), inside.end());
  r.count = inside.size();
  for (double e : inside) r.direct += f(e);

  // With y = b - t the integral is -int_a^b f'(y) N([a, y]) dy, and N([a, y]) is
  // the number of eigenvalues <= y, constant between consecutive eigenvalues.
  std::vector<double> knots{a};
  for (double e : inside)
    if (e > knots.back()) knots.push_back(e);
  if (b > knots.back()) knots.push_back(b);

  boost::math::quadrature::tanh_sinh<double> integrator;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double lo = knots[k], hi = knots[k + 1];
    const auto count = static_cast<double>(
        std::upper_bound(inside.begin(), inside.end(), lo) - inside.begin());
    if (count == 0.0) continue;
    r.piecewise -= count * (f(hi) - f(lo));
    double err = 0.0;
    // In t = b - y the singular end of f' (if any) sits at t = 0 where nodes are exact.
    const double piece = integrator.integrate(f_prime_from_top, b - hi, b - lo, 1e-13, &err);
    r.quadrature -= count * piece;
    r.quadrature_error += count * err * std::max(1.0, std::abs(piece));
  }
  if (std::abs(r.quadrature - r.direct) > tolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "layer_cake_check: quadrature " << r.quadrature << " misses direct sum " << r.direct;
    throw QuadratureFailure(os.str());
  }
  r.holds = std::abs(r.piecewise - r.direct) <= tolerance;
  return r;
}

TailBoundReport tail_bound_check(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  TailBoundReport r;
  const Eigen::VectorXd ea = eig_dense(a);
  const Eigen::VectorXd es = eig_dense(Eigen::MatrixXd(a + b));
  const Eigen::VectorXd eb = eig_dense(b);
  r.alpha = ea.size() ? ea(0) : 0.0;
  for (Eigen::Index i = 0; i < es.size(); ++i) {
    if (es(i) <= r.alpha - 1.0) {
      r.lhs += std::sqrt(r.alpha - es(i));
      ++r.count;
    }
  }
  r.rhs = eb.cwiseAbs().sum();
  r.holds = r.lhs <= r.rhs;
  return r;
}

std::vector<ConstantStudyRow> critical_constant_study(const std::vector<double>& potential,
                                                      const std::vector<double>& lambdas,
                                                      std::size_t half_width, std::size_t jobs) {
  const std::size_t size = 2 * half_width + 1;
  if (potential.size() > size) throw InvalidArgument("critical_constant_study: box too small");
  const GapSet free_band{{-2.0, 2.0}};
  const double inf = std::numeric_limits<double>::infinity();
  double v_norm = 0.0;
  for (double v : potential) v_norm += std::abs(v);
  return parallel_map(lambdas.size(), jobs, [&](std::size_t i) {
    const double lambda = lambdas[i];
    const JacobiOperator base = build_free(size, Extent::WholeLine);
    JacobiPerturbation pert;
    const long first = -static_cast<long>(potential.size() / 2);
    for (std::size_t k = 0; k < potential.size(); ++k)
      pert.set_b(base.index_of_site(first + static_cast<long>(k)), -lambda * potential[k]);
    const JacobiOperator j = apply_perturbation(base, pert);
    std::vector<double> eigs = localized_eigenvalues(j, {-inf, -2.0});
    const std::vector<double> upper = localized_eigenvalues(j, {2.0, inf});
    eigs.insert(eigs.end(), upper.begin(), upper.end());
    const LtSumReport rep = lt_sum(eigs, free_band, 0.5);
    ConstantStudyRow row;
    row.lambda = lambda;
    row.sum = rep.sum;
    row.norm = std::abs(lambda) * v_norm;
    row.ratio = row.norm > 0.0 ? row.sum / row.norm : 0.0;
    row.count = rep.eigenvalues.size();
    return row;
  });
}

}  // namespace ltgap
