#include "ltgap/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace ltgap {

namespace {

std::string shift_message(const char* where, double e) {
  std::ostringstream os;
  os.precision(17);
  os << where << ": shift " << e << " is numerically an eigenvalue";
  return os.str();
}

double pivmin_of(const SymTridiagonal& t) {
  double amax2 = 1.0;
  for (double a : t.off) amax2 = std::max(amax2, a * a);
  return std::numeric_limits<double>::min() * amax2 * 4.0;
}

std::pair<double, double> gershgorin(const SymTridiagonal& t) {
  const std::size_t n = t.size();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(t.off[i - 1]);
    if (i + 1 < n) r += std::abs(t.off[i]);
    lo = std::min(lo, t.diag[i] - r);
    hi = std::max(hi, t.diag[i] + r);
  }
  const double pad = 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
  return {lo - pad, hi + pad};
}

}  // namespace

double matrix_scale(const Eigen::MatrixXd& c) {
  if (c.size() == 0) return 1.0;
  return std::max(c.cwiseAbs().rowwise().sum().maxCoeff(), 1e-300);
}

CountResult count_below(const SymTridiagonal& t, double e, double tolerance) {
  if (tolerance <= 0.0) tolerance = kShiftToleranceFactor * t.scale();
  CountResult out{0, {-std::numeric_limits<double>::infinity(), e}, tolerance};
  double d = 1.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    d = t.diag[i] - e - (i > 0 ? t.off[i - 1] * t.off[i - 1] / d : 0.0);
    if (std::abs(d) < tolerance) throw SingularShift(shift_message("count_below", e), e);
    if (d < 0.0) ++out.count;
  }
  return out;
}

CountResult count_below(const JacobiOperator& j, double e, double tolerance) {
  return count_below(j.tridiagonal(), e, tolerance);
}

CountResult count_below(const Eigen::MatrixXd& c, double e, double tolerance) {
  if (tolerance <= 0.0) tolerance = kShiftToleranceFactor * matrix_scale(c);
  CountResult out{0, {-std::numeric_limits<double>::infinity(), e}, tolerance};
  const Eigen::VectorXd ev = eig_dense(c);
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i) - e) < tolerance) throw SingularShift(shift_message("count_below", e), e);
    if (ev(i) < e) ++out.count;
  }
  return out;
}

CountResult count_in_interval(const SymTridiagonal& t, Interval interval, double tolerance) {
  if (tolerance <= 0.0) tolerance = kShiftToleranceFactor * t.scale();
  if (interval.empty()) return {0, interval, tolerance};
  const auto hi = count_below(t, interval.hi, tolerance);
  const auto lo = count_below(t, interval.lo, tolerance);
  return {hi.count - lo.count, interval, tolerance};
}

CountResult count_in_interval(const Eigen::MatrixXd& c, Interval interval, double tolerance) {
  if (tolerance <= 0.0) tolerance = kShiftToleranceFactor * matrix_scale(c);
  if (interval.empty()) return {0, interval, tolerance};
  const Eigen::VectorXd ev = eig_dense(c);
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i) - interval.lo) < tolerance)
      throw SingularShift(shift_message("count_in_interval", interval.lo), interval.lo);
    if (std::abs(ev(i) - interval.hi) < tolerance)
      throw SingularShift(shift_message("count_in_interval", interval.hi), interval.hi);
    if (interval.contains(ev(i))) ++count;
  }
  return {count, interval, tolerance};
}

std::size_t sturm_count(const SymTridiagonal& t, double e) noexcept {
  const double pivmin = pivmin_of(t);
  std::size_t count = 0;
  double d = 1.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    d = t.diag[i] - e - (i > 0 ? t.off[i - 1] * t.off[i - 1] / d : 0.0);
    if (std::abs(d) < pivmin) d = -pivmin;
    if (d < 0.0) ++count;
  }
  return count;
}

std::vector<double> eig_tridiagonal(const SymTridiagonal& t, std::optional<Interval> window) {
  std::vector<double> out;
  if (t.size() == 0) return out;
  if (t.size() == 1) {
    if (!window || window->contains(t.diag[0])) out.push_back(t.diag[0]);
    return out;
  }
  auto [lo, hi] = gershgorin(t);
  if (window) {
    lo = std::max(lo, window->lo);
    hi = std::min(hi, window->hi);
    if (!(lo < hi)) return out;
  }
  const double abs_tol = 1e-13 * t.scale();

  struct Piece {
    double l, u;
    std::size_t cl, cu;
  };
  std::vector<Piece> stack{{lo, hi, sturm_count(t, lo), sturm_count(t, hi)}};
  out.reserve(stack.front().cu - stack.front().cl);
  while (!stack.empty()) {
    Piece p = stack.back();
    stack.pop_back();
    if (p.cu == p.cl) continue;
    const double mid = 0.5 * (p.l + p.u);
    const double tol = std::max(abs_tol, 4.0 * std::numeric_limits<double>::epsilon() *
                                             std::max(std::abs(p.l), std::abs(p.u)));
    if (p.u - p.l <= tol || mid <= p.l || mid >= p.u) {
      out.insert(out.end(), p.cu - p.cl, mid);
      continue;
    }
    const std::size_t cm = sturm_count(t, mid);
    // Upper half first so the left half is processed next.
    stack.push_back({mid, p.u, cm, p.cu});
    stack.push_back({p.l, mid, p.cl, cm});
  }
  std::sort(out.begin(), out.end());
  if (window) {
    std::erase_if(out, [&](double x) { return !window->contains(x); });
  }
  return out;
}

std::vector<double> eig_tridiagonal(const JacobiOperator& j, std::optional<Interval> window) {
  return eig_tridiagonal(j.tridiagonal(), window);
}

Eigen::VectorXd eig_dense(const Eigen::MatrixXd& c) {
  if (c.rows() == 0) return Eigen::VectorXd();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error("eig_dense: eigensolver did not converge");
  return solver.eigenvalues();
}

SpectralProjector spectral_projector(const Eigen::MatrixXd& c, Interval interval) {
  const auto n = c.rows();
  SpectralProjector out{Eigen::MatrixXd::Zero(n, n), interval, 0};
  if (n == 0) return out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c);
  if (solver.info() != Eigen::Success) throw Error("spectral_projector: eigensolver failed");
  const auto& ev = solver.eigenvalues();
  const auto& v = solver.eigenvectors();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double gap = std::min(std::abs(ev(i) - interval.lo), std::abs(ev(i) - interval.hi));
    if (gap <= 1e-8) {
      const double at = std::abs(ev(i) - interval.lo) <= 1e-8 ? interval.lo : interval.hi;
      throw SingularShift(shift_message("spectral_projector", at), at);
    }
    if (interval.contains(ev(i))) {
      out.matrix.noalias() += v.col(i) * v.col(i).transpose();
      ++out.rank;
    }
  }
  return out;
}

QuadratureRule tridiagonal_quadrature(const SymTridiagonal& t) {
  const std::size_t n = t.size();
  std::vector<double> d = t.diag;
  std::vector<double> e(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) e[i] = t.off[i];
  std::vector<double> z(n, 0.0);
  if (n > 0) z[0] = 1.0;
  const double eps = std::numeric_limits<double>::epsilon();

  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m != l) {
        if (++iter > 100) throw Error("tridiagonal_quadrature: QL iteration did not converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        bool deflated = false;
        for (std::size_t ii = m; ii-- > l;) {
          const double f = s * e[ii];
          const double b = c * e[ii];
          r = std::hypot(f, g);
          e[ii + 1] = r;
          if (r == 0.0) {
            d[ii + 1] -= p;
            e[m] = 0.0;
            deflated = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[ii + 1] - p;
          r = (d[ii] - g) * s + 2.0 * c * b;
          p = s * r;
          d[ii + 1] = g + p;
          g = c * r - b;
          const double zf = z[ii + 1];
          z[ii + 1] = s * z[ii] + c * zf;
          z[ii] = c * z[ii] - s * zf;
        }
        if (deflated) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  QuadratureRule rule;
  rule.nodes.reserve(n);
  rule.weights.reserve(n);
  for (std::size_t i : order) {
    rule.nodes.push_back(d[i]);
    rule.weights.push_back(z[i] * z[i]);
  }
  return rule;
}

Eigen::VectorXd tridiagonal_eigenvector(const SymTridiagonal& t, double eigenvalue) {
  const std::size_t n = t.size();
  if (n == 0) return Eigen::VectorXd();
  if (n == 1) return Eigen::VectorXd::Ones(1);
  const double scale = t.scale();
  const double tiny = std::numeric_limits<double>::epsilon() * scale;
  // Slight offset keeps the shifted matrix nonsingular in exact arithmetic.
  const double sigma = eigenvalue + 4.0 * tiny;

  Eigen::VectorXd x = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) x(static_cast<Eigen::Index>(i)) += 1e-3 * std::sin(1.0 + i);
  x.normalize();

  for (int sweep = 0; sweep < 3; ++sweep) {
    std::vector<double> dl(t.off), dd(n), du(t.off), du2(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) dd[i] = t.diag[i] - sigma;
    std::vector<double> b(x.data(), x.data() + n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::abs(dd[i]) >= std::abs(dl[i])) {
        if (dd[i] == 0.0) dd[i] = tiny;
        const double fact = dl[i] / dd[i];
        dd[i + 1] -= fact * du[i];
        b[i + 1] -= fact * b[i];
        du2[i] = 0.0;
      } else {
        const double fact = dd[i] / dl[i];
        dd[i] = dl[i];
        const double temp = dd[i + 1];
        dd[i + 1] = du[i] - fact * temp;
        if (i + 2 < n) {
          du2[i] = du[i + 1];
          du[i + 1] = -fact * du2[i];
        }
        du[i] = temp;
        const double tb = b[i];
        b[i] = b[i + 1];
        b[i + 1] = tb - fact * b[i + 1];
      }
    }
    if (dd[n - 1] == 0.0) dd[n - 1] = tiny;
    b[n - 1] /= dd[n - 1];
    b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / dd[n - 2];
    for (std::size_t i = n - 2; i-- > 0;)
      b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / dd[i];
    for (std::size_t i = 0; i < n; ++i) x(static_cast<Eigen::Index>(i)) = b[i];
    const double norm = x.norm();
    if (!(norm > 0.0) || !std::isfinite(norm))
      throw Error("tridiagonal_eigenvector: inverse iteration broke down");
    x /= norm;
  }
  // Deterministic sign: largest-magnitude component positive.
  Eigen::Index imax = 0;
  x.cwiseAbs().maxCoeff(&imax);
  if (x(imax) < 0.0) x = -x;
  return x;
}

}  // namespace ltgap
