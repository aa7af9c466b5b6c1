#include "ltgap/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ltgap::oracle {

std::vector<double> jacobi_rotation_eigenvalues(Eigen::MatrixXd a, double tolerance,
                                                int max_sweeps) {
  const Eigen::Index n = a.rows();
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (std::sqrt(off) < tolerance * scale) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

Eigen::MatrixXd gauss_jordan_inverse(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd m(n, 2 * n);
  m << a, Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = col;
    for (Eigen::Index r = col + 1; r < n; ++r)
      if (std::abs(m(r, col)) > std::abs(m(pivot, col))) pivot = r;
    if (m(pivot, col) == 0.0) throw std::runtime_error("gauss_jordan_inverse: singular matrix");
    m.row(col).swap(m.row(pivot));
    m.row(col) /= m(col, col);
    for (Eigen::Index r = 0; r < n; ++r)
      if (r != col) m.row(r) -= m(r, col) * m.row(col);
  }
  return m.rightCols(n);
}

std::size_t count_below(const std::vector<double>& eigenvalues, double e) {
  return static_cast<std::size_t>(
      std::count_if(eigenvalues.begin(), eigenvalues.end(), [e](double x) { return x < e; }));
}

double rk4_discriminant(const std::function<double(double)>& v, double period, double e,
                        std::size_t steps) {
  // Columns (u, u') for the two fundamental solutions.
  double y[2][2] = {{1.0, 0.0}, {0.0, 1.0}};
  const double h = period / static_cast<double>(steps);
  auto rhs = [&](double x, const double* s, double* out) {
    out[0] = s[1];
    out[1] = (v(x) - e) * s[0];
  };
  for (std::size_t i = 0; i < steps; ++i) {
    const double x = h * static_cast<double>(i);
    for (auto& s : y) {
      double k1[2], k2[2], k3[2], k4[2], t[2];
      rhs(x, s, k1);
      t[0] = s[0] + 0.5 * h * k1[0];
      t[1] = s[1] + 0.5 * h * k1[1];
      rhs(x + 0.5 * h, t, k2);
      t[0] = s[0] + 0.5 * h * k2[0];
      t[1] = s[1] + 0.5 * h * k2[1];
      rhs(x + 0.5 * h, t, k3);
      t[0] = s[0] + h * k3[0];
      t[1] = s[1] + h * k3[1];
      rhs(x + h, t, k4);
      s[0] += h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
      s[1] += h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
    }
  }
  return y[0][0] + y[1][1];
}

double bisect(const std::function<double(double)>& g, double lo, double hi, double tolerance) {
  double glo = g(lo);
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if ((gm < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<std::pair<double, double>> rk4_bands(const std::function<double(double)>& v,
                                                 double period, double e_min, double e_max,
                                                 std::size_t scan) {
  auto delta = [&](double e) { return rk4_discriminant(v, period, e); };
  std::vector<double> edges;
  double prev_e = e_min, prev_d = delta(e_min);
  for (std::size_t i = 1; i <= scan; ++i) {
    const double e = e_min + (e_max - e_min) * static_cast<double>(i) / static_cast<double>(scan);
    const double d = delta(e);
    for (double level : {2.0, -2.0}) {
      if ((prev_d - level) * (d - level) < 0.0)
        edges.push_back(bisect([&](double x) { return delta(x) - level; }, prev_e, e));
    }
    prev_e = e;
    prev_d = d;
  }
  std::sort(edges.begin(), edges.end());
  std::vector<std::pair<double, double>> bands;
  for (std::size_t i = 0; i + 1 < edges.size(); i += 2) bands.emplace_back(edges[i], edges[i + 1]);
  return bands;
}

std::pair<std::vector<double>, std::vector<double>> tridiagonal_measure(
    const std::vector<double>& diag, const std::vector<double>& off) {
  const auto n = static_cast<Eigen::Index>(diag.size());
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) t(i, i) = diag[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 0; i + 1 < n; ++i) t(i, i + 1) = t(i + 1, i) = off[static_cast<std::size_t>(i)];
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
  std::vector<double> nodes(static_cast<std::size_t>(n)), weights(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    nodes[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    const double c = es.eigenvectors()(0, i);
    weights[static_cast<std::size_t>(i)] = c * c;
  }
  return {nodes, weights};
}

double smoothed_measure(const std::vector<double>& nodes, const std::vector<double>& weights,
                        double x, double sigma) {
  const double norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
  double s = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double z = (x - nodes[i]) / sigma;
    s += weights[i] * norm * std::exp(-0.5 * z * z);
  }
  return s;
}

}  // namespace ltgap::oracle
