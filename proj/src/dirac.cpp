#include "ltgap/dirac.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/roots.hpp>

#include "ltgap/errors.hpp"
#include "ltgap/lt_bounds.hpp"
#include "ltgap/parallel.hpp"
#include "ltgap/szego.hpp"

namespace ltgap {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

struct Node {
  double x, w;
};

/// Composite 16-point Gauss-Legendre nodes on [0, L), split at the breakpoints,
/// with panels no longer than `max_panel`.
std::vector<Node> quadrature_nodes(const std::vector<double>& breakpoints, double length,
                                   double max_panel) {
  std::vector<double> cuts{0.0};
  for (double b : breakpoints)
    if (b > 0.0 && b < length) cuts.push_back(b);
  cuts.push_back(length);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const auto& [gx, gw] = gauss_legendre(16);
  std::vector<Node> nodes;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    const auto panels = static_cast<std::size_t>(std::ceil((hi - lo) / max_panel));
    const double h = (hi - lo) / static_cast<double>(std::max<std::size_t>(1, panels));
    for (std::size_t p = 0; p < std::max<std::size_t>(1, panels); ++p) {
      const double a = lo + h * static_cast<double>(p);
      for (std::size_t q = 0; q < gx.size(); ++q)
        nodes.push_back({a + 0.5 * h * (gx[q] + 1.0), 0.5 * h * gw[q]});
    }
  }
  return nodes;
}

double omega(double p, double m) { return std::hypot(p, m); }

/// sqrt(p^2 + m^2) - m without cancellation.
double h0_symbol(double p, double m) { return p * p / (omega(p, m) + m); }

void check_config(const DiracConfig& cfg) {
  if (!(cfg.mass > 0.0)) throw InvalidArgument("dirac: mass must be positive");
  if (!(cfg.box_length > 0.0)) throw InvalidArgument("dirac: box length must be positive");
  if (cfg.half_modes == 0) throw InvalidArgument("dirac: need at least one nonzero mode");
  if (!cfg.potential.value) throw InvalidArgument("dirac: potential is not set");
}

std::vector<double> gap_window(const Eigen::VectorXd& eigs, double m, double widen) {
  const double edge = m * (1.0 - 1e-11) + widen;
  std::vector<double> out;
  for (Eigen::Index i = 0; i < eigs.size(); ++i)
    if (std::abs(eigs(i)) < edge) out.push_back(eigs(i));
  return out;
}

double s_gamma(const Eigen::MatrixXcd& h, double gamma) {
  const Eigen::VectorXd e = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h, Eigen::EigenvaluesOnly)
                                .eigenvalues();
  double s = 0.0;
  for (Eigen::Index i = 0; i < e.size(); ++i)
    if (e(i) < 0.0) s += std::pow(-e(i), gamma);
  return s;
}

}  // namespace

std::vector<std::complex<double>> fourier_coefficients(const DiracPotential& v, double length,
                                                       std::size_t max_n) {
  const auto nodes =
      quadrature_nodes(v.breakpoints, length, length / static_cast<double>(max_n + 4));
  std::vector<double> values(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) values[i] = v.value(nodes[i].x) * nodes[i].w;
  std::vector<cplx> out(2 * max_n + 1);
  for (std::size_t n = 0; n <= max_n; ++n) {
    cplx acc = 0.0;
    const double w = 2.0 * kPi * static_cast<double>(n) / length;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += values[i] * std::polar(1.0, -w * nodes[i].x);
    acc /= length;
    out[max_n + n] = acc;
    out[max_n - n] = std::conj(acc);
  }
  out[max_n] = out[max_n].real();
  return out;
}

std::pair<DiracPotential, DiracPotential> potential_parts(const DiracPotential& v, double length) {
  std::vector<double> cuts{0.0};
  for (double b : v.breakpoints)
    if (b > 0.0 && b < length) cuts.push_back(b);
  cuts.push_back(length);
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> breaks(cuts.begin() + 1, cuts.end() - 1);
  constexpr std::size_t kSamples = 4096;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    // Sample strictly inside each smooth piece and bisect every sign change.
    const double lo = cuts[i], hi = cuts[i + 1];
    const auto samples = std::max<std::size_t>(
        16, static_cast<std::size_t>(kSamples * (hi - lo) / length));
    double x0 = lo + 1e-12 * (hi - lo), f0 = v.value(x0);
    for (std::size_t k = 1; k <= samples; ++k) {
      const double x1 =
          k == samples ? hi - 1e-12 * (hi - lo) : lo + (hi - lo) * static_cast<double>(k) / samples;
      const double f1 = v.value(x1);
      if ((f0 < 0.0 && f1 > 0.0) || (f0 > 0.0 && f1 < 0.0)) {
        auto tol = [](double a, double b) { return std::abs(b - a) < 1e-15 * std::max(1.0, std::abs(a)); };
        const auto root = boost::math::tools::bisect(v.value, x0, x1, tol);
        breaks.push_back(0.5 * (root.first + root.second));
      }
      x0 = x1;
      f0 = f1;
    }
  }
  std::sort(breaks.begin(), breaks.end());
  const auto f = v.value;
  DiracPotential plus{[f](double x) { return std::max(f(x), 0.0); }, breaks};
  DiracPotential minus{[f](double x) { return std::max(-f(x), 0.0); }, breaks};
  return {plus, minus};
}

std::vector<double> grid_momenta(const DiracConfig& cfg) {
  const auto k = static_cast<long>(cfg.half_modes);
  std::vector<double> p;
  for (long i = -k; i <= k; ++i) p.push_back(2.0 * kPi * static_cast<double>(i) / cfg.box_length);
  return p;
}

Eigen::MatrixXcd dirac_matrix(const DiracConfig& cfg) {
  check_config(cfg);
  const std::size_t m = cfg.modes();
  const auto vhat = fourier_coefficients(cfg.potential, cfg.box_length, 2 * cfg.half_modes);
  const auto p = grid_momenta(cfg);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(2 * m), static_cast<Eigen::Index>(2 * m));
  const std::size_t c = 2 * cfg.half_modes;
  for (std::size_t i = 0; i < m; ++i) {
    const auto r = static_cast<Eigen::Index>(2 * i);
    h(r, r) += cfg.mass;
    h(r + 1, r + 1) -= cfg.mass;
    h(r, r + 1) += p[i];
    h(r + 1, r) += p[i];
    for (std::size_t j = 0; j < m; ++j) {
      const cplx v = vhat[c + i - j];
      const auto s = static_cast<Eigen::Index>(2 * j);
      h(r, s) += v;
      h(r + 1, s + 1) += v;
    }
  }
  return h;
}

Eigen::MatrixXcd scalar_matrix(const DiracConfig& cfg, const DiracPotential& w) {
  check_config(cfg);
  const std::size_t m = cfg.modes();
  const auto what = fourier_coefficients(w, cfg.box_length, 2 * cfg.half_modes);
  const auto p = grid_momenta(cfg);
  const std::size_t c = 2 * cfg.half_modes;
  Eigen::MatrixXcd h(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = -what[c + i - j];
  for (std::size_t i = 0; i < m; ++i)
    h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += h0_symbol(p[i], cfg.mass);
  return h;
}

GapEigReport dirac_gap_eigs(const DiracConfig& cfg, bool refine) {
  GapEigReport r;
  r.half_modes = cfg.half_modes;
  const Eigen::VectorXd eigs =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(dirac_matrix(cfg), Eigen::EigenvaluesOnly)
          .eigenvalues();
  r.eigenvalues = gap_window(eigs, cfg.mass, 0.0);
  if (!refine) return r;

  DiracConfig fine = cfg;
  fine.half_modes = 2 * cfg.half_modes;
  const Eigen::VectorXd fine_eigs =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(dirac_matrix(fine), Eigen::EigenvaluesOnly)
          .eigenvalues();
  // Compare in a window widened by the tolerance so that eigenvalues next to
  // +-m are matched across the edge.
  const double tol = 1e-6;
  const auto a = gap_window(eigs, cfg.mass, tol);
  const auto b = gap_window(fine_eigs, cfg.mass, tol);
  if (a.size() != b.size()) {
    r.refinement_shift = std::numeric_limits<double>::infinity();
    r.converged = false;
    return r;
  }
  for (std::size_t i = 0; i < a.size(); ++i)
    r.refinement_shift = std::max(r.refinement_shift, std::abs(a[i] - b[i]));
  r.converged = r.refinement_shift <= tol;
  return r;
}

std::pair<double, double> scalar_relativistic_sums(const DiracConfig& cfg, double gamma) {
  if (!(gamma > 0.0)) throw InvalidArgument("scalar_relativistic_sums: gamma must be positive");
  const auto [plus, minus] = potential_parts(cfg.potential, cfg.box_length);
  return {s_gamma(scalar_matrix(cfg, minus), gamma), s_gamma(scalar_matrix(cfg, plus), gamma)};
}

ReductionReport check_reduction(const DiracConfig& cfg, double gamma) {
  if (!(gamma > 0.0)) throw InvalidArgument("check_reduction: gamma must be positive");
  ReductionReport r;
  r.gamma = gamma;
  const GapEigReport eig = dirac_gap_eigs(cfg, false);
  r.count = eig.eigenvalues.size();
  for (double e : eig.eigenvalues) r.lhs += std::pow(cfg.mass - std::abs(e), gamma);
  std::tie(r.s_minus, r.s_plus) = scalar_relativistic_sums(cfg, gamma);
  r.rhs = 2.0 * (r.s_minus + r.s_plus);
  r.slack = r.rhs - r.lhs;
  r.holds = r.lhs <= r.rhs + 1e-9;
  return r;
}

SymbolReport symbol_inequalities(double rho, double mass, std::size_t points) {
  if (!(rho > 0.0) || !(mass > 0.0) || points < 3)
    throw InvalidArgument("symbol_inequalities: need rho > 0, m > 0 and at least 3 points");
  SymbolReport r;
  r.rho = rho;
  r.mass = mass;
  const double s = std::sqrt(rho * rho + 1.0) - 1.0;
  r.c1 = s / (rho * rho);
  r.c2 = s / rho;
  const double pb = rho * mass;
  r.boundary_defect = std::abs(r.c2 * pb - r.c1 * pb * pb / mass);

  // Symmetric grid on [-P, P] with P = 20 rho m, plus the points +-rho m and 0.
  const double pmax = 20.0 * pb;
  std::vector<double> grid;
  grid.reserve(points + 3);
  for (std::size_t i = 0; i < points; ++i)
    grid.push_back(-pmax + 2.0 * pmax * static_cast<double>(i) / static_cast<double>(points - 1));
  grid.push_back(pb);
  grid.push_back(-pb);
  grid.push_back(0.0);
  r.grid_points = grid.size();

  // Relative rounding allowance of a few ulps in f and in the bound.
  const double ulps = 8.0 * std::numeric_limits<double>::epsilon();
  r.min_margin_low = std::numeric_limits<double>::infinity();
  r.min_margin_high = std::numeric_limits<double>::infinity();
  bool ok = true;
  for (double p : grid) {
    const double f = h0_symbol(p, mass);
    const double ap = std::abs(p);
    if (ap <= pb) {
      const double bound = r.c1 * p * p / mass;
      const double margin = f > 0.0 ? (f - bound) / f : f - bound;
      r.min_margin_low = std::min(r.min_margin_low, margin);
      if (margin < -ulps) ok = false;
    }
    if (ap >= pb) {
      const double bound = r.c2 * ap;
      const double margin = (f - bound) / f;
      r.min_margin_high = std::min(r.min_margin_high, margin);
      if (margin < -ulps) ok = false;
    }
  }
  r.holds = ok && r.boundary_defect <= ulps * r.c2 * pb;
  return r;
}

ResolventComparison resolvent_comparison(const DiracConfig& cfg, double energy) {
  check_config(cfg);
  if (!(std::abs(energy) < cfg.mass))
    throw InvalidArgument("resolvent_comparison: need |E| < m");
  ResolventComparison r;
  r.energy = energy;
  r.min_eig_upper = r.min_eig_lower = std::numeric_limits<double>::infinity();
  // D0 and H0 are both diagonal in the Fourier modes, so the comparison splits
  // into 2 x 2 blocks.
  for (double p : grid_momenta(cfg)) {
    Eigen::Matrix2d d0;
    d0 << cfg.mass, p, p, -cfg.mass;
    const double s = 1.0 / (h0_symbol(p, cfg.mass) + cfg.mass - energy);
    const Eigen::Matrix2d upper =
        s * Eigen::Matrix2d::Identity() + (d0 + energy * Eigen::Matrix2d::Identity()).inverse();
    const Eigen::Matrix2d lower =
        s * Eigen::Matrix2d::Identity() - (d0 - energy * Eigen::Matrix2d::Identity()).inverse();
    r.min_eig_upper = std::min(r.min_eig_upper, Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(
                                                    0.5 * (upper + upper.transpose()))
                                                    .eigenvalues()(0));
    r.min_eig_lower = std::min(r.min_eig_lower, Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(
                                                    0.5 * (lower + lower.transpose()))
                                                    .eigenvalues()(0));
  }
  r.holds = r.min_eig_upper >= -1e-9 && r.min_eig_lower >= -1e-9;
  return r;
}

DiracConfig scaled_config(const DiracConfig& cfg, double t) {
  if (!(t > 0.0)) throw InvalidArgument("scaled_config: t must be positive");
  DiracConfig out = cfg;
  out.mass = t * cfg.mass;
  out.box_length = cfg.box_length / t;
  const auto f = cfg.potential.value;
  out.potential.value = [f, t](double x) { return t * f(t * x); };
  out.potential.breakpoints.clear();
  for (double b : cfg.potential.breakpoints) out.potential.breakpoints.push_back(b / t);
  return out;
}

double potential_norm(const DiracPotential& v, double length, double power) {
  const auto nodes = quadrature_nodes(v.breakpoints, length, length / 64.0);
  double s = 0.0;
  for (const Node& n : nodes) s += n.w * std::pow(std::abs(v.value(n.x)), power);
  return s;
}

WeightReport weight_bound_sweep(const DiracPotential& shape, const std::vector<double>& masses,
                                const std::vector<double>& lambdas, double gamma,
                                double box_length, std::size_t half_modes, std::size_t jobs) {
  if (gamma < 0.5) throw InvalidArgument("weight_bound_sweep: gamma must be >= 1/2");
  WeightReport rep;
  rep.gamma = gamma;
  const double n1 = potential_norm(shape, box_length, gamma + 1.0);
  const double n2 = potential_norm(shape, box_length, gamma + 0.5);
  rep.rows = parallel_map(masses.size() * lambdas.size(), jobs, [&](std::size_t i) {
    WeightRow row;
    row.mass = masses[i / lambdas.size()];
    row.lambda = lambdas[i % lambdas.size()];
    DiracConfig cfg;
    cfg.mass = row.mass;
    cfg.box_length = box_length;
    cfg.half_modes = half_modes;
    const auto f = shape.value;
    const double l = row.lambda;
    cfg.potential = {[f, l](double x) { return l * f(x); }, shape.breakpoints};
    const GapEigReport eig = dirac_gap_eigs(cfg, true);
    row.count = eig.eigenvalues.size();
    row.converged = eig.converged;
    for (double e : eig.eigenvalues) row.lhs += std::pow(row.mass - std::abs(e), gamma);
    const double al = std::abs(l);
    row.rhs = std::pow(al, gamma + 1.0) * n1 + std::sqrt(row.mass) * std::pow(al, gamma + 0.5) * n2;
    row.ratio = row.rhs > 0.0 ? row.lhs / row.rhs : 0.0;
    return row;
  });
  std::vector<double> ratios;
  for (const WeightRow& row : rep.rows) {
    rep.sup_ratio = std::max(rep.sup_ratio, row.ratio);
    if (row.ratio > 0.0) ratios.push_back(row.ratio);
  }
  if (!ratios.empty()) rep.median_ratio = median(ratios);
  rep.bounded = !ratios.empty() && rep.sup_ratio <= 10.0 * rep.median_ratio;
  return rep;
}

DiracPotential random_trig_potential(SplitMix64& rng, double length) {
  const std::size_t degree = rng.between(1, 4);
  const double scale = rng.uniform(0.2, 2.0);
  std::vector<double> c(degree + 1), s(degree + 1);
  for (std::size_t j = 0; j <= degree; ++j) {
    c[j] = scale * rng.normal();
    s[j] = j == 0 ? 0.0 : scale * rng.normal();
  }
  const double w = 2.0 * kPi / length;
  return {[c, s, w](double x) {
            double v = 0.0;
            for (std::size_t j = 0; j < c.size(); ++j) {
              const double t = w * static_cast<double>(j) * x;
              v += c[j] * std::cos(t) + s[j] * std::sin(t);
            }
            return v;
          },
          {}};
}

DiracPotential square_well(double lambda, double lo, double hi) {
  return {[lambda, lo, hi](double x) { return x >= lo && x <= hi ? -lambda : 0.0; }, {lo, hi}};
}

}  // namespace ltgap
