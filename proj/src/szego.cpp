#include "ltgap/szego.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "ltgap/band_structure.hpp"
#include "ltgap/errors.hpp"
#include "ltgap/lt_bounds.hpp"

namespace ltgap {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

/// Root of gamma m^2 + (delta - alpha) m - beta = 0 in the upper half plane.
cplx herglotz_fixed_point(cplx alpha, cplx beta, cplx gamma, cplx delta) {
  const cplx A = gamma, B = delta - alpha, C = -beta;
  const cplx r = std::sqrt(B * B - 4.0 * A * C);
  const cplx q = -0.5 * (std::real(std::conj(B) * r) >= 0.0 ? B + r : B - r);
  const cplx m1 = q / A;
  const cplx m2 = C / q;
  const bool up1 = m1.imag() > 0.0, up2 = m2.imag() > 0.0;
  if (up1 == up2) {
    std::ostringstream os;
    os << "m_function: cannot select the Herglotz branch (roots " << m1 << ", " << m2 << ")";
    throw BranchSelectionFailure(os.str());
  }
  return up1 ? m1 : m2;
}

}  // namespace

double HalfLineModel::a(std::size_t n) const {
  return n < head_a.size() ? head_a[n] : period_a[n % period_a.size()];
}

double HalfLineModel::b(std::size_t n) const {
  return n < head_b.size() ? head_b[n] : period_b[n % period_b.size()];
}

HalfLineModel half_line_model(const std::vector<double>& period_a,
                              const std::vector<double>& period_b, const JacobiPerturbation& pert) {
  if (period_a.empty() || period_a.size() != period_b.size())
    throw InvalidArgument("half_line_model: bad period");
  HalfLineModel m;
  m.period_a = period_a;
  m.period_b = period_b;
  const std::size_t n0 = pert.empty() ? 0 : pert.support().second + 1;
  for (std::size_t n = 0; n < n0; ++n) {
    m.head_a.push_back(period_a[n % period_a.size()] + pert.a(n));
    m.head_b.push_back(period_b[n % period_b.size()] + pert.b(n));
    if (!(m.head_a.back() > 0.0)) throw InvalidArgument("half_line_model: a_n must stay positive");
  }
  return m;
}

std::complex<double> m_free(std::complex<double> z) {
  return herglotz_fixed_point(0.0, 1.0, -1.0, -z);
}

std::complex<double> m_function(const HalfLineModel& model, std::complex<double> z) {
  if (!(z.imag() > 0.0)) throw InvalidArgument("m_function: need Im z > 0");
  const std::size_t n0 = model.head_b.size();
  const std::size_t p = model.period_a.size();
  // Composite Moebius map over one period starting at site n0; each site acts as
  // m -> 1 / (b - z - a^2 m), i.e. the matrix [[0, 1], [-a^2, b - z]].
  cplx M00 = 1.0, M01 = 0.0, M10 = 0.0, M11 = 1.0;
  for (std::size_t k = 0; k < p; ++k) {
    const std::size_t n = n0 + k;
    const double a = model.a(n);
    const cplx s10 = -a * a, s11 = model.b(n) - z;
    // M <- M * S
    const cplx t00 = M01 * s10, t01 = M00 + M01 * s11;
    const cplx t10 = M11 * s10, t11 = M10 + M11 * s11;
    M00 = t00;
    M01 = t01;
    M10 = t10;
    M11 = t11;
  }
  cplx m = herglotz_fixed_point(M00, M01, M10, M11);
  for (std::size_t n = n0; n-- > 0;) {
    const double a = model.a(n);
    m = 1.0 / (model.b(n) - z - a * a * m);
  }
  if (!(m.imag() > 0.0)) throw BranchSelectionFailure("m_function: Herglotz property lost");
  return m;
}

double free_density(double x) {
  return std::abs(x) < 2.0 ? std::sqrt(4.0 - x * x) / (2.0 * kPi) : 0.0;
}

double density_at(const HalfLineModel& model, const GapSet& bands, double x) {
  if (!bands.in_band(x)) return 0.0;
  double d = std::numeric_limits<double>::infinity();
  for (const Band& b : bands.bands()) d = std::min({d, std::abs(x - b.lo), std::abs(x - b.hi)});
  if (!(d > 0.0)) return 0.0;
  const double eta = std::min(1e-2, 0.01 * d);
  auto F = [&](double e) { return m_function(model, {x, e}).imag() / kPi; };
  const double value = (8.0 * F(0.25 * eta) - 6.0 * F(0.5 * eta) + F(eta)) / 3.0;
  return std::max(value, 0.0);
}

SpectralDensity spectral_density(const HalfLineModel& model, const GapSet& bands) {
  SpectralDensity d;
  d.support = bands;
  d.eta_schedule = {1.0, 0.5, 0.25};
  d.evaluate = [model, bands](double x) { return density_at(model, bands, x); };
  return d;
}

const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, std::pair<std::vector<double>, std::vector<double>>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<double> x(n), w(n);
  const auto un = static_cast<unsigned>(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      const double p = std::legendre(un, z);
      const double p1 = std::legendre(un - 1, z);
      dp = static_cast<double>(n) * (z * p - p1) / (z * z - 1.0);
      const double dz = p / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double p = std::legendre(un, z), p1 = std::legendre(un - 1, z);
    dp = static_cast<double>(n) * (z * p - p1) / (z * z - 1.0);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return cache.emplace(n, std::make_pair(std::move(x), std::move(w))).first->second;
}

namespace {

/// log f at distance d from an edge; below d_min the value follows the power law
/// fitted between d_min and 4 d_min.
struct EdgeLog {
  const std::function<double(double)>& f;
  double edge;
  double direction;  // +1: band lies to the right of the edge
  double d_min;
  double log_f1 = 0.0, slope = 0.0;

  EdgeLog(const std::function<double(double)>& fn, double e, double dir)
      : f(fn), edge(e), direction(dir), d_min(1e-10 * std::max(1.0, std::abs(e))) {
    const double f1 = f(edge + direction * d_min);
    const double f2 = f(edge + direction * 4.0 * d_min);
    log_f1 = std::log(f1);
    slope = (std::log(f2) - log_f1) / std::log(4.0);
  }

  double operator()(double d) const {
    if (d < d_min) return log_f1 + slope * std::log(d / d_min);
    return std::log(f(edge + direction * d));
  }
};

double checked(double v) {
  if (!std::isfinite(v)) throw DivergenceSuspected("szego_integral: log f is not finite at a node");
  return v;
}

}  // namespace

SzegoResult szego_integral(const std::function<double(double)>& f, const GapSet& bands,
                           double tolerance, std::size_t max_nodes) {
  if (bands.empty()) throw InvalidArgument("szego_integral: empty band set");
  const bool chebyshev = bands.band_count() == 1 && std::abs(bands.lower() + 2.0) < 1e-12 &&
                         std::abs(bands.upper() - 2.0) < 1e-12;

  // Smoothstep S(u) = 3u^2 - 2u^3 flattens the endpoint log singularities.
  auto S = [](double u) { return u * u * (3.0 - 2.0 * u); };
  auto dS = [](double u) { return 6.0 * u * (1.0 - u); };

  std::vector<EdgeLog> edges;
  if (chebyshev) {
    edges.emplace_back(f, 2.0, -1.0);
    edges.emplace_back(f, -2.0, 1.0);
  } else {
    for (const Band& b : bands.bands()) {
      edges.emplace_back(f, b.lo, 1.0);
      edges.emplace_back(f, b.hi, -1.0);
    }
  }

  auto evaluate = [&](std::size_t n) {
    const auto& [nodes, weights] = gauss_legendre(n);
    double total = 0.0;
    if (chebyshev) {
      // x = 2 cos(theta): the weight (4 - x^2)^{-1/2} dx becomes d theta. Each
      // half of [0, pi] is parametrized from its own endpoint.
      for (int half = 0; half < 2; ++half) {
        const EdgeLog& e = edges[static_cast<std::size_t>(half)];
        for (std::size_t i = 0; i < n; ++i) {
          const double u = 0.5 * (nodes[i] + 1.0);
          const double t = 0.5 * kPi * S(u);  // angle from the edge, in [0, pi/2]
          const double d = 4.0 * std::sin(0.5 * t) * std::sin(0.5 * t);
          total += 0.5 * weights[i] * 0.5 * kPi * dS(u) * checked(e(d));
        }
      }
    } else {
      // Each band half: x = edge +- s^2 with s in [0, sqrt(half width)], so that
      // dist^{-1/2} dx = 2 ds.
      for (std::size_t j = 0; j < bands.band_count(); ++j) {
        const Band& b = bands.bands()[j];
        const double smax = std::sqrt(0.5 * (b.hi - b.lo));
        for (int side = 0; side < 2; ++side) {
          const EdgeLog& e = edges[2 * j + static_cast<std::size_t>(side)];
          for (std::size_t i = 0; i < n; ++i) {
            const double u = 0.5 * (nodes[i] + 1.0);
            const double s = smax * S(u);
            total += 0.5 * weights[i] * 2.0 * smax * dS(u) * checked(e(s * s));
          }
        }
      }
    }
    return total;
  };

  SzegoResult r;
  std::size_t n = 16;
  double prev = evaluate(n);
  while (n < max_nodes) {
    n *= 2;
    const double cur = evaluate(n);
    r.last_change = std::abs(cur - prev);
    r.value = cur;
    r.nodes = n;
    if (r.last_change <= tolerance * std::max(1.0, std::abs(cur))) return r;
    prev = cur;
  }
  std::ostringstream os;
  os << "szego_integral: node doubling stalled (last change " << r.last_change << " at " << n
     << " nodes)";
  throw DivergenceSuspected(os.str());
}

// Capacity ----------------------------------------------------------------------

namespace {

struct Configuration {
  std::vector<double> x;       // sorted
  std::vector<std::size_t> band;
  double energy = -std::numeric_limits<double>::infinity();
};

double log_energy(const std::vector<double>& x) {
  double e = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) e += std::log(std::abs(x[j] - x[i]));
  return e;
}

/// Projected Newton ascent of sum log|x_i - x_j| with points confined to their bands.
void optimize(Configuration& c, const GapSet& set) {
  const std::size_t n = c.x.size();
  const auto& bands = set.bands();
  c.energy = log_energy(c.x);
  for (int iter = 0; iter < 200; ++iter) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const double d = c.x[i] - c.x[j];
        g(static_cast<Eigen::Index>(i)) += 1.0 / d;
        h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0 / (d * d);
        h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) -= 1.0 / (d * d);
      }
    }
    // Active set: points on a band edge pushed outward stay fixed.
    std::vector<Eigen::Index> free;
    double gnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Band& b = bands[c.band[i]];
      const double gi = g(static_cast<Eigen::Index>(i));
      const bool at_lo = c.x[i] <= b.lo, at_hi = c.x[i] >= b.hi;
      if ((at_lo && gi <= 0.0) || (at_hi && gi >= 0.0)) continue;
      free.push_back(static_cast<Eigen::Index>(i));
      gnorm = std::max(gnorm, std::abs(gi));
    }
    if (free.empty() || gnorm < 1e-11 * static_cast<double>(n)) break;
    const auto nf = static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXd hf(nf, nf);
    Eigen::VectorXd gf(nf);
    for (Eigen::Index a = 0; a < nf; ++a) {
      gf(a) = g(free[static_cast<std::size_t>(a)]);
      for (Eigen::Index b = 0; b < nf; ++b)
        hf(a, b) = h(free[static_cast<std::size_t>(a)], free[static_cast<std::size_t>(b)]);
    }
    // -H is positive semidefinite; a small shift keeps it definite when no point is fixed.
    Eigen::MatrixXd neg = -hf;
    neg.diagonal().array() += 1e-14 * neg.diagonal().cwiseAbs().maxCoeff();
    Eigen::VectorXd step = neg.ldlt().solve(gf);
    if (!step.allFinite()) step = gf;

    double t = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      std::vector<double> y = c.x;
      for (Eigen::Index a = 0; a < nf; ++a) {
        const auto i = static_cast<std::size_t>(free[static_cast<std::size_t>(a)]);
        const Band& b = bands[c.band[i]];
        y[i] = std::clamp(c.x[i] + t * step(a), b.lo, b.hi);
      }
      bool ordered = true;
      for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(y[i] < y[i + 1])) ordered = false;
      if (!ordered) continue;
      const double e = log_energy(y);
      if (e > c.energy) {
        c.x = std::move(y);
        c.energy = e;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
}

/// Chebyshev-Lobatto points in each band with the given counts.
Configuration lobatto_configuration(const GapSet& set, const std::vector<std::size_t>& counts) {
  Configuration c;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    const Band& b = set.bands()[j];
    const std::size_t m = counts[j];
    for (std::size_t k = 0; k < m; ++k) {
      const double t = m == 1 ? 0.5 : static_cast<double>(k) / static_cast<double>(m - 1);
      c.x.push_back(0.5 * (b.lo + b.hi) - 0.5 * (b.hi - b.lo) * std::cos(kPi * t));
      c.band.push_back(j);
    }
  }
  return c;
}

/// Greedy (Leja-type) selection of n points from a fine grid on the bands.
std::vector<std::size_t> greedy_counts(const GapSet& set, std::size_t n) {
  std::vector<double> grid;
  std::vector<std::size_t> owner;
  const double total = set.measure();
  for (std::size_t j = 0; j < set.band_count(); ++j) {
    const Band& b = set.bands()[j];
    const auto g = std::max<std::size_t>(
        50, static_cast<std::size_t>(40.0 * static_cast<double>(n) * (b.hi - b.lo) / total));
    for (std::size_t k = 0; k < g; ++k) {
      grid.push_back(0.5 * (b.lo + b.hi) -
                     0.5 * (b.hi - b.lo) * std::cos(kPi * static_cast<double>(k) / (g - 1)));
      owner.push_back(j);
    }
  }
  std::vector<double> potential(grid.size(), 0.0);
  std::vector<bool> taken(grid.size(), false);
  std::vector<std::size_t> counts(set.band_count(), 0);
  for (std::size_t pick = 0; pick < n; ++pick) {
    std::size_t best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (taken[k]) continue;
      const double v = pick == 0 ? std::abs(grid[k]) : potential[k];
      if (v > best_value) {
        best_value = v;
        best = k;
      }
    }
    taken[best] = true;
    ++counts[owner[best]];
    for (std::size_t k = 0; k < grid.size(); ++k)
      if (!taken[k]) potential[k] += std::log(std::abs(grid[k] - grid[best]));
  }
  return counts;
}

Configuration fekete_configuration(const GapSet& set, std::size_t n) {
  std::vector<std::size_t> counts = greedy_counts(set, n);
  Configuration best = lobatto_configuration(set, counts);
  optimize(best, set);
  // Local exchange of single points between bands.
  bool changed = true;
  while (changed && set.band_count() > 1) {
    changed = false;
    for (std::size_t from = 0; from < counts.size(); ++from) {
      for (std::size_t to = 0; to < counts.size(); ++to) {
        if (from == to || counts[from] <= 1) continue;
        std::vector<std::size_t> trial = counts;
        --trial[from];
        ++trial[to];
        Configuration c = lobatto_configuration(set, trial);
        optimize(c, set);
        if (c.energy > best.energy + 1e-12) {
          best = std::move(c);
          counts = std::move(trial);
          changed = true;
        }
      }
    }
  }
  return best;
}

}  // namespace

CapacityEstimate capacity_fekete(const GapSet& gapset, const std::vector<std::size_t>& sizes) {
  if (gapset.empty()) throw InvalidArgument("capacity: empty band set");
  if (sizes.size() < 5) throw InvalidArgument("capacity: need at least five sizes to extrapolate");
  CapacityEstimate est;
  est.gapset = gapset;
  est.method = "fekete";
  est.sizes = sizes;
  Eigen::MatrixXd design(static_cast<Eigen::Index>(sizes.size()), 5);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(sizes.size()));
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const std::size_t n = sizes[i];
    if (n < 3) throw InvalidArgument("capacity: sizes must be >= 3");
    const Configuration c = fekete_configuration(gapset, n);
    const double nn = static_cast<double>(n);
    const double log_delta = 2.0 * c.energy / (nn * (nn - 1.0));
    est.raw.push_back(std::exp(log_delta));
    if (i + 1 == sizes.size()) est.fekete_points = c.x;
    const auto r = static_cast<Eigen::Index>(i);
    design(r, 0) = 1.0;
    design(r, 1) = std::log(nn) / nn;
    design(r, 2) = 1.0 / nn;
    design(r, 3) = std::log(nn) / (nn * nn);
    design(r, 4) = 1.0 / (nn * nn);
    rhs(r) = log_delta;
  }
  const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(rhs);
  est.value = std::exp(coef(0));
  return est;
}

CapacityEstimate capacity_fekete(const GapSet& gapset, std::size_t n_max) {
  std::vector<std::size_t> sizes;
  for (std::size_t n = 20; n <= n_max; n += 10) sizes.push_back(n);
  return capacity_fekete(gapset, sizes);
}

CapacityEstimate capacity_periodic(const std::vector<double>& period_a,
                                   const std::vector<double>& period_b) {
  CapacityEstimate est;
  est.gapset = periodic_band_set(period_a, period_b);
  est.method = "periodic-product";
  double log_prod = 0.0;
  for (double a : period_a) log_prod += std::log(a);
  est.value = std::exp(log_prod / static_cast<double>(period_a.size()));
  return est;
}

double capacity_symmetric_two_intervals(double a, double b) {
  if (!(0.0 < a && a < b)) throw InvalidArgument("two-interval capacity: need 0 < a < b");
  return 0.5 * std::sqrt(b * b - a * a);
}

ProductLimitReport product_limit_check(const std::function<double(std::size_t)>& a,
                                       double capacity, std::size_t n_max) {
  if (!(capacity > 0.0)) throw InvalidArgument("product_limit_check: capacity must be positive");
  ProductLimitReport r;
  std::vector<double> all(n_max + 1, 1.0);
  double log_p = 0.0;
  const double log_c = std::log(capacity);
  r.min_value = std::numeric_limits<double>::infinity();
  r.max_value = 0.0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double an = a(n - 1);
    if (!(an > 0.0)) throw InvalidArgument("product_limit_check: a_n must be positive");
    log_p += std::log(an) - log_c;
    all[n] = std::exp(log_p);
    r.min_value = std::min(r.min_value, all[n]);
    r.max_value = std::max(r.max_value, all[n]);
  }
  for (std::size_t n = 1; n <= n_max; n *= 2) {
    r.n.push_back(n);
    r.partial.push_back(all[n]);
    if (2 * n <= n_max) r.cauchy.push_back(std::abs(all[2 * n] - all[n]));
  }
  r.limit = all[n_max];
  r.cauchy_decreasing = true;
  for (std::size_t i = 1; i < r.cauchy.size(); ++i)
    if (r.cauchy[i] > r.cauchy[i - 1] + 1e-15) r.cauchy_decreasing = false;
  r.bounded = std::isfinite(r.max_value) && r.min_value > 1e-12 && r.max_value < 1e12;
  return r;
}

NevaiReport nevai_pipeline(const std::vector<double>& period_a, const std::vector<double>& period_b,
                           const JacobiPerturbation& pert, NevaiOptions options) {
  NevaiReport rep;
  const GapSet bands = periodic_band_set(period_a, period_b);

  // (a) eigenvalues of the whole-line operator outside the bands.
  const JacobiOperator base = build_periodic(period_a, period_b, options.truncation, Extent::WholeLine);
  const JacobiPerturbation placed = pert.shifted(base.index_of_site(0));
  const JacobiOperator j = apply_perturbation(base, placed);
  std::vector<double> eigs;
  for (const Interval& region : complement_regions(bands)) {
    const auto found = localized_eigenvalues(j, region);
    eigs.insert(eigs.end(), found.begin(), found.end());
  }
  const LtSumReport lt = lt_sum(eigs, bands, 0.5);
  rep.lt_sum = lt.sum;
  rep.eigenvalue_count = lt.eigenvalues.size();

  // (b) normalized product of the half-line a_n.
  const HalfLineModel model = half_line_model(period_a, period_b, pert);
  const double cap = capacity_periodic(period_a, period_b).value;
  const auto prod = product_limit_check([&](std::size_t n) { return model.a(n); }, cap,
                                        options.product_terms);
  rep.product_limit = prod.limit;

  // (c) Szego integral of the a.c. density.
  const SpectralDensity density = spectral_density(model, bands);
  rep.szego = szego_integral(density.evaluate, bands, 1e-9).value;

  rep.finite = std::isfinite(rep.lt_sum) && prod.bounded && std::isfinite(rep.szego);
  rep.note = "finitely supported perturbation; density from the exact periodic tail";
  return rep;
}

}  // namespace ltgap
