#include "ltgap/band_structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "ltgap/errors.hpp"
#include "ltgap/parallel.hpp"

namespace ltgap {

namespace {

constexpr double kPi = std::numbers::pi;

void require_period(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || a.size() != b.size())
    throw InvalidArgument("period parameters must have equal nonzero length");
  for (double x : a)
    if (!(x > 0.0)) throw InvalidArgument("period off-diagonal entries must be positive");
}

Eigen::VectorXd floquet_eigenvalues(const std::vector<double>& a, const std::vector<double>& b,
                                    double theta) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(floquet_matrix(a, b, theta),
                                                         Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

GapSet merge_ranges(std::vector<Band> ranges, double tol) {
  std::sort(ranges.begin(), ranges.end(), [](const Band& x, const Band& y) { return x.lo < y.lo; });
  std::vector<Band> merged;
  for (const Band& r : ranges) {
    if (!merged.empty() && r.lo <= merged.back().hi + tol)
      merged.back().hi = std::max(merged.back().hi, r.hi);
    else
      merged.push_back(r);
  }
  return GapSet(std::move(merged));
}

double angle_distance(double x, double y) {
  double d = std::fmod(std::abs(x - y), 2.0 * kPi);
  return std::min(d, 2.0 * kPi - d);
}

/// Eigenvector of band j at theta, phase aligned with `reference` (or, without
/// reference, largest-magnitude component real positive).
Eigen::VectorXcd band_vector(const std::vector<double>& a, const std::vector<double>& b,
                             std::size_t j, double theta, const Eigen::VectorXcd* reference,
                             double* energy) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(floquet_matrix(a, b, theta));
  Eigen::VectorXcd w = solver.eigenvectors().col(static_cast<Eigen::Index>(j));
  if (energy) *energy = solver.eigenvalues()(static_cast<Eigen::Index>(j));
  std::complex<double> phase;
  if (reference) {
    phase = reference->dot(w);  // <reference, w>
  } else {
    Eigen::Index imax = 0;
    w.cwiseAbs().maxCoeff(&imax);
    phase = w(imax);
  }
  if (std::abs(phase) > 0.0) w *= std::conj(phase) / std::abs(phase);
  return w;
}

}  // namespace

Eigen::MatrixXcd floquet_matrix(const std::vector<double>& period_a,
                                const std::vector<double>& period_b, double theta) {
  require_period(period_a, period_b);
  const auto p = static_cast<Eigen::Index>(period_a.size());
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) h(i, i) = period_b[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 0; i + 1 < p; ++i) {
    h(i, i + 1) = period_a[static_cast<std::size_t>(i)];
    h(i + 1, i) = period_a[static_cast<std::size_t>(i)];
  }
  const double ap = period_a.back();
  const std::complex<double> phase = std::polar(1.0, theta);
  h(p - 1, 0) += ap * phase;
  h(0, p - 1) += ap * std::conj(phase);
  return h;
}

BlochData bloch_bands(const std::vector<double>& period_a, const std::vector<double>& period_b,
                      std::size_t theta_count, bool with_vectors) {
  require_period(period_a, period_b);
  if (theta_count < 2 || theta_count % 2)
    throw InvalidArgument("bloch_bands: theta_count must be even and >= 2");
  const std::size_t p = period_a.size();
  BlochData d;
  d.period = p;
  d.bands.assign(p, std::vector<double>(theta_count));
  if (with_vectors) d.vectors.assign(p, std::vector<Eigen::VectorXcd>(theta_count));
  for (std::size_t k = 0; k < theta_count; ++k) {
    const double theta = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(theta_count);
    d.theta.push_back(theta);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
        floquet_matrix(period_a, period_b, theta),
        with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    for (std::size_t j = 0; j < p; ++j) {
      d.bands[j][k] = solver.eigenvalues()(static_cast<Eigen::Index>(j));
      if (with_vectors) d.vectors[j][k] = solver.eigenvectors().col(static_cast<Eigen::Index>(j));
    }
  }
  return d;
}

GapSet detect_gaps(const BlochData& bloch, double merge_tolerance) {
  std::vector<Band> ranges;
  for (const auto& band : bloch.bands) {
    const auto [lo, hi] = std::minmax_element(band.begin(), band.end());
    ranges.push_back({*lo, std::max(*hi, *lo + 1e-300)});
  }
  return merge_ranges(std::move(ranges), merge_tolerance);
}

GapSet periodic_band_set(const std::vector<double>& period_a, const std::vector<double>& period_b,
                         double merge_tolerance) {
  require_period(period_a, period_b);
  const Eigen::VectorXd e0 = floquet_eigenvalues(period_a, period_b, 0.0);
  const Eigen::VectorXd epi = floquet_eigenvalues(period_a, period_b, kPi);
  std::vector<Band> ranges;
  for (Eigen::Index j = 0; j < e0.size(); ++j) {
    const double lo = std::min(e0(j), epi(j));
    const double hi = std::max(e0(j), epi(j));
    ranges.push_back({lo, std::max(hi, lo + 1e-300)});
  }
  return merge_ranges(std::move(ranges), merge_tolerance);
}

bool EdgeExpansion::all_hold() const {
  return std::all_of(hypotheses.begin(), hypotheses.end(),
                     [](const HypothesisCheck& h) { return h.holds; });
}

EdgeExpansion edge_expansion(const std::vector<double>& period_a,
                             const std::vector<double>& period_b, Band gap, EdgeSide side,
                             EdgeOptions options) {
  require_period(period_a, period_b);
  if (!(gap.hi - gap.lo > 1e-9)) throw ClosedGap("edge_expansion: gap has no width");
  const GapSet bands = periodic_band_set(period_a, period_b);
  bool found = false;
  for (const Band& g : bands.gaps())
    if (std::abs(g.lo - gap.lo) < 1e-8 && std::abs(g.hi - gap.hi) < 1e-8) found = true;
  if (!found) {
    std::ostringstream os;
    os << "edge_expansion: (" << gap.lo << ", " << gap.hi << ") is not an open gap of "
       << bands.to_string();
    throw ClosedGap(os.str());
  }

  EdgeExpansion x;
  x.side = side;
  x.edge_energy = side == EdgeSide::TopOfGap ? gap.hi : gap.lo;
  const double s = side == EdgeSide::TopOfGap ? 1.0 : -1.0;
  const std::size_t p = period_a.size();

  // Band and Floquet angle attaining the edge.
  double best = std::numeric_limits<double>::infinity();
  for (double theta : {0.0, kPi}) {
    const Eigen::VectorXd ev = floquet_eigenvalues(period_a, period_b, theta);
    for (std::size_t j = 0; j < p; ++j) {
      const double d = std::abs(ev(static_cast<Eigen::Index>(j)) - x.edge_energy);
      if (d < best) {
        best = d;
        x.band = j;
        x.theta0 = theta;
      }
    }
  }

  // Window: a quarter of the angular distance to the nearest crossing with a
  // neighbouring band, capped at 0.3.
  const std::size_t scan = 2048;
  double crossing = kPi;
  for (std::size_t k = 0; k < scan; ++k) {
    const double theta = 2.0 * kPi * static_cast<double>(k) / scan;
    const Eigen::VectorXd ev = floquet_eigenvalues(period_a, period_b, theta);
    const auto j = static_cast<Eigen::Index>(x.band);
    double sep = std::numeric_limits<double>::infinity();
    if (j > 0) sep = std::min(sep, ev(j) - ev(j - 1));
    if (j + 1 < ev.size()) sep = std::min(sep, ev(j + 1) - ev(j));
    if (sep < 1e-8) crossing = std::min(crossing, angle_distance(theta, x.theta0));
  }
  x.delta = options.delta > 0.0 ? options.delta : std::min(0.3, 0.25 * crossing);
  if (!(x.delta > 0.0)) throw DegenerateEdge("edge_expansion: band crossing at the edge");

  const std::size_t n = std::max<std::size_t>(options.samples, 4);
  double e0 = 0.0;
  const Eigen::VectorXcd w0 = band_vector(period_a, period_b, x.band, x.theta0, nullptr, &e0);

  x.c1 = std::numeric_limits<double>::infinity();
  x.c2 = w0.cwiseAbs().maxCoeff();
  double symmetry_energy = 0.0, symmetry_vector = 0.0;
  bool monotone = true;
  double prev_energy = e0;
  Eigen::VectorXcd prev_plus = w0, prev_minus = w0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double k = x.delta * static_cast<double>(i) / static_cast<double>(n);
    double ep = 0.0, em = 0.0;
    const Eigen::VectorXcd wp =
        band_vector(period_a, period_b, x.band, x.theta0 + k, &prev_plus, &ep);
    const Eigen::VectorXcd wm =
        band_vector(period_a, period_b, x.band, x.theta0 - k, &prev_minus, &em);
    prev_plus = wp;
    prev_minus = wm;
    x.k.push_back(k);
    x.energy.push_back(ep);
    x.c1 = std::min({x.c1, s * (ep - x.edge_energy) / (k * k), s * (em - x.edge_energy) / (k * k)});
    x.c2 = std::max({x.c2, wp.cwiseAbs().maxCoeff(), wm.cwiseAbs().maxCoeff()});
    const double dv = std::max((wp - w0).cwiseAbs().maxCoeff(), (wm - w0).cwiseAbs().maxCoeff());
    x.c3 = std::max(x.c3, dv / (k * k));
    x.c3_linear = std::max(x.c3_linear, dv / k);
    symmetry_energy = std::max(symmetry_energy, std::abs(ep - em));
    symmetry_vector = std::max(symmetry_vector, (wm - wp.conjugate()).cwiseAbs().maxCoeff());
    if (s * (ep - prev_energy) <= 0.0) monotone = false;
    prev_energy = ep;
  }
  x.epsilon = s * (x.energy.back() - x.edge_energy);
  {
    const double k = 0.5 * x.k.front();
    const Eigen::VectorXcd wh =
        band_vector(period_a, period_b, x.band, x.theta0 + k, &w0, nullptr);
    x.c3_refined = std::max(x.c3, (wh - w0).cwiseAbs().maxCoeff() / (k * k));
  }
  // Plane-wave normalization of unit-cell-normalized Bloch vectors.
  x.rho_minus = x.rho_plus = 2.0 * kPi;

  if (x.c1 < 1e-8) {
    std::ostringstream os;
    os << "edge_expansion: quadratic constant " << x.c1 << " vanishes at the edge";
    throw DegenerateEdge(os.str());
  }

  // Another band entering the energy window [b, b + eps) would break the
  // single-band expansion.
  bool single = monotone;
  for (std::size_t k = 0; k < scan && single; ++k) {
    const double theta = 2.0 * kPi * static_cast<double>(k) / scan;
    const Eigen::VectorXd ev = floquet_eigenvalues(period_a, period_b, theta);
    for (Eigen::Index j = 0; j < ev.size(); ++j) {
      if (static_cast<std::size_t>(j) == x.band) continue;
      const double d = s * (ev(j) - x.edge_energy);
      if (d >= 0.0 && d < x.epsilon) single = false;
    }
  }

  auto num = [](double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
  };
  x.hypotheses = {
      {"gap_disjoint", true, "open gap (" + num(gap.lo) + ", " + num(gap.hi) + ")"},
      {"single_band_window", single,
       monotone ? "band monotone on the window" : "band not monotone on the window"},
      {"rho_bounded", x.rho_minus > 0.0 && std::isfinite(x.rho_plus), "rho = 2 pi"},
      {"quadratic_edge", x.c1 > 0.0 && symmetry_energy < 1e-10, "c1 = " + num(x.c1)},
      {"bloch_bounded", std::isfinite(x.c2), "c2 = " + num(x.c2)},
      {"vector_regularity_quadratic", x.c3_refined <= 1.5 * x.c3 + 1e-12,
       "c3 = " + num(x.c3) + ", halving the smallest k gives " + num(x.c3_refined) +
           "; linear constant " + num(x.c3_linear)},
      {"theta_monotone", true, "theta'(k) = 1/" + std::to_string(p)},
      {"reflection_symmetry", symmetry_energy < 1e-10 && symmetry_vector < 1e-8,
       "energy defect " + num(symmetry_energy) + ", vector defect " + num(symmetry_vector)},
  };
  return x;
}

// Continuum ---------------------------------------------------------------------

namespace {

struct Mat2 {
  double a, b, c, d;  // [[a, b], [c, d]]
};

Mat2 mul(const Mat2& x, const Mat2& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
          x.c * y.b + x.d * y.d};
}

/// exp of the traceless matrix [[c, h], [g, -c]].
Mat2 exp_traceless(double c, double h, double g) {
  const double q = c * c + h * g;  // Omega^2 = q I
  double ch, sh;                   // cosh(sqrt q), sinh(sqrt q)/sqrt q
  if (std::abs(q) < 1e-8) {
    ch = 1.0 + q / 2.0 + q * q / 24.0;
    sh = 1.0 + q / 6.0 + q * q / 120.0;
  } else if (q > 0.0) {
    const double r = std::sqrt(q);
    ch = std::cosh(r);
    sh = std::sinh(r) / r;
  } else {
    const double r = std::sqrt(-q);
    ch = std::cos(r);
    sh = std::sin(r) / r;
  }
  return {ch + sh * c, sh * h, sh * g, ch - sh * c};
}

/// Transfer matrix over [x0, x1] with n fourth-order Magnus steps.
Mat2 magnus_transfer(const std::function<double(double)>& v, double e, double x0, double x1,
                     std::size_t n) {
  static const double gauss = std::sqrt(3.0) / 6.0;
  static const double comm = std::sqrt(3.0) / 12.0;
  const double h = (x1 - x0) / static_cast<double>(n);
  Mat2 m{1.0, 0.0, 0.0, 1.0};
  for (std::size_t i = 0; i < n; ++i) {
    const double xs = x0 + h * static_cast<double>(i);
    const double q1 = v(xs + h * (0.5 - gauss)) - e;
    const double q2 = v(xs + h * (0.5 + gauss)) - e;
    // Omega = h/2 (A1 + A2) + sqrt(3)/12 h^2 [A2, A1], A = [[0, 1], [q, 0]].
    const Mat2 step = exp_traceless(comm * h * h * (q1 - q2), h, 0.5 * h * (q1 + q2));
    m = mul(step, m);
  }
  return m;
}

std::vector<double> period_knots(const PeriodicPotential& v0) {
  std::vector<double> knots{0.0};
  std::vector<double> bp = v0.breakpoints;
  std::sort(bp.begin(), bp.end());
  for (double b : bp)
    if (b > 0.0 && b < v0.period) knots.push_back(b);
  knots.push_back(v0.period);
  return knots;
}

Mat2 monodromy(const PeriodicPotential& v0, const std::vector<double>& knots, double e,
               std::size_t steps_per_unit_piece) {
  Mat2 m{1.0, 0.0, 0.0, 1.0};
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double frac = (knots[i + 1] - knots[i]) / v0.period;
    const auto n = std::max<std::size_t>(
        4, static_cast<std::size_t>(std::ceil(frac * static_cast<double>(steps_per_unit_piece))));
    m = mul(magnus_transfer(v0.value, e, knots[i], knots[i + 1], n), m);
  }
  return m;
}

double node_value(const std::function<double(double)>& f, double x, double h,
                  const std::vector<double>& jumps, double period) {
  for (double j : jumps) {
    double d = x - j;
    if (period > 0.0) d -= period * std::round(d / period);
    if (std::abs(d) < 1e-9 * h) {
      const double eta = 1e-7 * h;
      return 0.5 * (f(x - eta) + f(x + eta));
    }
  }
  return f(x);
}

}  // namespace

DiscriminantValue continuum_discriminant(const PeriodicPotential& v0, double e, double tolerance) {
  if (!v0.value) throw InvalidArgument("continuum_discriminant: potential not set");
  if (!(v0.period > 0.0)) throw InvalidArgument("continuum_discriminant: period must be positive");
  const auto knots = period_knots(v0);
  // Enough steps per period to resolve the local wavelength from the start.
  std::size_t steps = 64;
  const double wavenumber = std::sqrt(std::abs(e)) * v0.period;
  while (static_cast<double>(steps) < 4.0 * wavenumber) steps *= 2;

  Mat2 coarse = monodromy(v0, knots, e, steps);
  for (int level = 0; level < 14; ++level) {
    steps *= 2;
    const Mat2 fine = monodromy(v0, knots, e, steps);
    const double d_coarse = coarse.a + coarse.d;
    const double d_fine = fine.a + fine.d;
    if (std::abs(d_fine - d_coarse) <= tolerance * std::max(1.0, std::abs(d_fine))) {
      return {d_fine, fine.a * fine.d - fine.b * fine.c, steps};
    }
    coarse = fine;
  }
  std::ostringstream os;
  os.precision(17);
  os << "continuum_discriminant: step doubling did not converge at E = " << e;
  throw IntegrationFailure(os.str());
}

DiscriminantCurve discriminant_curve(const PeriodicPotential& v0,
                                     const std::vector<double>& energies, std::size_t jobs) {
  const auto values = parallel_map(energies.size(), jobs, [&](std::size_t i) {
    return continuum_discriminant(v0, energies[i]);
  });
  DiscriminantCurve c;
  c.period_length = v0.period;
  c.energy = energies;
  for (const auto& v : values) {
    c.value.push_back(v.delta);
    c.max_determinant_defect = std::max(c.max_determinant_defect, std::abs(v.determinant - 1.0));
  }
  return c;
}

ContinuumBands continuum_band_edges(const PeriodicPotential& v0, double e_min, double e_max,
                                    std::size_t scan_points) {
  if (!(e_min < e_max) || scan_points < 2)
    throw InvalidArgument("continuum_band_edges: bad scan range");
  ContinuumBands out;
  auto delta = [&](double e) {
    ++out.evaluations;
    return continuum_discriminant(v0, e).delta;
  };
  std::vector<double> grid(scan_points + 1), values(scan_points + 1);
  for (std::size_t i = 0; i <= scan_points; ++i) {
    grid[i] = e_min + (e_max - e_min) * static_cast<double>(i) / static_cast<double>(scan_points);
    values[i] = delta(grid[i]);
  }
  std::vector<double> roots;
  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-13 * std::max(1.0, std::abs(a)); };
  for (std::size_t i = 0; i < scan_points; ++i) {
    for (double level : {2.0, -2.0}) {
      const double fa = values[i] - level, fb = values[i + 1] - level;
      if (fa == 0.0) {
        roots.push_back(grid[i]);
      } else if (fa * fb < 0.0) {
        const auto r = boost::math::tools::bisect(
            [&](double e) { return delta(e) - level; }, grid[i], grid[i + 1], tol);
        roots.push_back(0.5 * (r.first + r.second));
      }
    }
  }
  std::sort(roots.begin(), roots.end());
  std::vector<double> knots{e_min};
  for (double r : roots)
    if (r > knots.back()) knots.push_back(r);
  if (e_max > knots.back()) knots.push_back(e_max);
  std::vector<Band> bands;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double mid = 0.5 * (knots[i] + knots[i + 1]);
    if (std::abs(delta(mid)) <= 2.0) {
      if (!bands.empty() && bands.back().hi == knots[i])
        bands.back().hi = knots[i + 1];
      else
        bands.push_back({knots[i], knots[i + 1]});
      if (i + 2 == knots.size()) out.ends_in_band = true;
    }
  }
  out.bands = GapSet(std::move(bands));
  return out;
}

ContinuumGapPoint continuum_gap_point(const ContinuumGapSetup& setup, double lambda,
                                      std::size_t points_per_period, std::size_t periods) {
  if (points_per_period < 2 || periods < 1)
    throw InvalidArgument("continuum_gap_point: bad discretization");
  const double period = setup.v0.period;
  const double h = period / static_cast<double>(points_per_period);
  const double inv_h2 = 1.0 / (h * h);
  const long m = static_cast<long>(periods * points_per_period);
  const std::size_t size = static_cast<std::size_t>(2 * m + 1);

  const std::vector<double>& v0_jumps = setup.v0.breakpoints;
  // The periodic part at node x_i = i h; cells start at multiples of the period.
  std::vector<double> cell_b(points_per_period);
  for (std::size_t r = 0; r < points_per_period; ++r) {
    const double x = h * static_cast<double>(r);
    cell_b[r] = 2.0 * inv_h2 + node_value(setup.v0.value, x, h, v0_jumps, period);
  }
  const GapSet bands =
      periodic_band_set(std::vector<double>(points_per_period, inv_h2), cell_b);
  const auto gaps = bands.gaps();
  if (setup.gap_index >= gaps.size()) {
    std::ostringstream os;
    os << "continuum_gap_point: gap " << setup.gap_index << " is not open in "
       << bands.to_string();
    throw ClosedGap(os.str());
  }

  std::vector<double> v_jumps = setup.v_breakpoints;
  v_jumps.push_back(setup.support_lo);
  v_jumps.push_back(setup.support_hi);
  std::vector<double> diag(size), off(size - 1, inv_h2);
  for (long i = -m; i <= m; ++i) {
    const double x = h * static_cast<double>(i);
    const auto r = static_cast<std::size_t>(((i % static_cast<long>(points_per_period)) +
                                             static_cast<long>(points_per_period)) %
                                            static_cast<long>(points_per_period));
    double v = 0.0;
    if (lambda != 0.0 && x >= setup.support_lo - 1e-9 * h && x <= setup.support_hi + 1e-9 * h)
      v = node_value(
          [&](double y) {
            return (y >= setup.support_lo && y <= setup.support_hi) ? setup.v(y) : 0.0;
          },
          x, h, v_jumps, 0.0);
    diag[static_cast<std::size_t>(i + m)] = cell_b[r] + lambda * v;
  }
  const JacobiOperator j(std::move(off), std::move(diag), Extent::WholeLine);

  ContinuumGapPoint pt;
  pt.lambda = lambda;
  pt.points_per_period = points_per_period;
  pt.periods = periods;
  pt.gap = gaps[setup.gap_index];
  pt.eigenvalues = localized_eigenvalues(j, {pt.gap.lo, pt.gap.hi}, setup.localization_threshold);
  for (double e : pt.eigenvalues) pt.sum += std::sqrt(bands.distance(e));

  std::vector<double> knots{setup.support_lo};
  std::vector<double> bp = setup.v_breakpoints;
  std::sort(bp.begin(), bp.end());
  for (double b : bp)
    if (b > setup.support_lo && b < setup.support_hi) knots.push_back(b);
  knots.push_back(setup.support_hi);
  double l1 = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i)
    l1 += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double y) { return std::abs(setup.v(y)); }, knots[i], knots[i + 1], 10, 1e-13);
  pt.norm = std::abs(lambda) * l1;
  pt.ratio = pt.norm > 0.0 ? pt.sum / pt.norm : 0.0;
  return pt;
}

ContinuumGapReport continuum_gap_experiment(const ContinuumGapSetup& setup,
                                            const std::vector<double>& lambdas,
                                            double reference_lambda, std::size_t jobs) {
  const std::size_t nl = lambdas.size();
  const std::size_t m = setup.points_per_period;
  const std::size_t p = setup.periods;
  // Three configurations per coupling plus the two extra refinements used for
  // the convergence-order estimate.
  const std::size_t tasks = 3 * nl + 2;
  auto points = parallel_map(tasks, jobs, [&](std::size_t t) {
    if (t == 3 * nl) return continuum_gap_point(setup, reference_lambda, m, p);
    if (t == 3 * nl + 1) return continuum_gap_point(setup, reference_lambda, 4 * m, p);
    const double lambda = lambdas[t / 3];
    switch (t % 3) {
      case 0: return continuum_gap_point(setup, lambda, m, p);
      case 1: return continuum_gap_point(setup, lambda, 2 * m, p);
      default: return continuum_gap_point(setup, lambda, m, 2 * p);
    }
  });

  ContinuumGapReport r;
  r.reference_lambda = reference_lambda;
  std::vector<double> ratios;
  auto rel = [](double ref, double other) {
    if (ref == 0.0 && other == 0.0) return 0.0;
    return std::abs(other - ref) / std::max(std::abs(ref), 1e-300);
  };
  for (std::size_t i = 0; i < nl; ++i) {
    r.base.push_back(points[3 * i]);
    r.half_mesh.push_back(points[3 * i + 1]);
    r.double_box.push_back(points[3 * i + 2]);
    ratios.push_back(points[3 * i].ratio);
    r.sup_ratio = std::max(r.sup_ratio, points[3 * i].ratio);
    r.max_mesh_change = std::max(r.max_mesh_change, rel(points[3 * i].ratio, points[3 * i + 1].ratio));
    r.max_box_change = std::max(r.max_box_change, rel(points[3 * i].ratio, points[3 * i + 2].ratio));
  }
  if (!ratios.empty()) r.median_ratio = median(ratios);

  // Observed order from h, h/2, h/4 at the reference coupling.
  const ContinuumGapPoint& coarse = points[3 * nl];
  const ContinuumGapPoint medium = continuum_gap_point(setup, reference_lambda, 2 * m, p);
  const ContinuumGapPoint& fine = points[3 * nl + 1];
  if (coarse.eigenvalues.size() == medium.eigenvalues.size() &&
      medium.eigenvalues.size() == fine.eigenvalues.size()) {
    for (std::size_t i = 0; i < coarse.eigenvalues.size(); ++i) {
      const double d1 = std::abs(coarse.eigenvalues[i] - medium.eigenvalues[i]);
      const double d2 = std::abs(medium.eigenvalues[i] - fine.eigenvalues[i]);
      r.richardson_orders.push_back(d2 > 0.0 ? std::log2(d1 / d2) : 0.0);
    }
  }
  return r;
}

}  // namespace ltgap
