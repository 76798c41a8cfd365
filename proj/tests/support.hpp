#pragma once

// Independent reference computations used as test oracles. They deliberately avoid
// the library's own quadrature and solver paths.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using Kernel = std::function<double(double, double)>;

inline double node(int i, int g) { return (i + 0.5) / g; }

/// Row-stochastic matrix a_ij = w(x_i, x_j) / sum_j w(x_i, x_j) on a midpoint grid:
/// the direct discretisation of the integral operator with kernel p.
inline Eigen::MatrixXd grid_operator(const Kernel& w, int g) {
  Eigen::MatrixXd a(g, g);
  for (int i = 0; i < g; ++i) {
    double row = 0.0;
    for (int j = 0; j < g; ++j) row += (a(i, j) = w(node(i, g), node(j, g)));
    a.row(i) /= row;
  }
  return a;
}

/// Arnoldi with full re-orthogonalisation; returns Ritz values sorted by magnitude
/// (descending, then imaginary part descending). steps should exceed the number of
/// wanted eigenvalues comfortably for kernels with fast spectral decay.
inline std::vector<std::complex<double>> arnoldi_top(const Eigen::MatrixXd& a, int wanted, int steps) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, steps + 1);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(steps + 1, steps);
  std::mt19937_64 gen(12345);
  std::normal_distribution<double> nd;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = nd(gen);
  q.col(0) = v.normalized();
  int k = 0;
  for (; k < steps; ++k) {
    Eigen::VectorXd z = a * q.col(k);
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j <= k; ++j) {
        const double c = q.col(j).dot(z);
        h(j, k) += c;
        z -= c * q.col(j);
      }
    }
    h(k + 1, k) = z.norm();
    if (h(k + 1, k) < 1e-14) {
      ++k;
      break;
    }
    q.col(k + 1) = z / h(k + 1, k);
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(h.topLeftCorner(k, k), false);
  std::vector<std::complex<double>> ev(es.eigenvalues().data(), es.eigenvalues().data() + k);
  std::sort(ev.begin(), ev.end(), [](auto x, auto y) {
    if (std::abs(std::abs(x) - std::abs(y)) > 1e-12) return std::abs(x) > std::abs(y);
    return x.imag() > y.imag();
  });
  ev.resize(static_cast<std::size_t>(std::min<int>(wanted, k)));
  return ev;
}

inline std::vector<std::complex<double>> top_by_magnitude(std::vector<std::complex<double>> ev, int wanted) {
  std::sort(ev.begin(), ev.end(), [](auto x, auto y) {
    if (std::abs(std::abs(x) - std::abs(y)) > 1e-12) return std::abs(x) > std::abs(y);
    return x.imag() > y.imag();
  });
  ev.resize(static_cast<std::size_t>(wanted));
  return ev;
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  return d;
}

/// KS statistic against the uniform distribution on [0,1].
inline double ks_uniform(std::vector<double> a) {
  std::sort(a.begin(), a.end());
  double d = 0.0;
  const double m = static_cast<double>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    d = std::max({d, std::abs((i + 1) / m - a[i]), std::abs(a[i] - i / m)});
  return d;
}

/// Triple-peak kernel written out directly.
inline double triple_peak(double x, double y) {
  auto sq = [](double t) { return t * t; };
  return 0.2 * std::exp(-(sq(x - 0.2) + sq(y - 0.2)) / 0.02) + 0.1 * std::exp(-(sq(x - 0.5) + sq(y - 0.5)) / 0.02) +
         0.2 * std::exp(-(std::pow(x - 0.8, 4) + std::pow(y - 0.8, 4)) / 0.0005);
}

/// Quadruple-peak kernel written out directly.
inline double quadruple_peak(double x, double y) {
  auto bump = [](double a, double cx, double cy, double s, double x, double y) {
    return a * std::exp(-((x - cx) * (x - cx) + (y - cy) * (y - cy)) / s);
  };
  return bump(0.2, 0.15, 0.3, 0.008, x, y) + bump(0.2, 0.3, 0.45, 0.008, x, y) +
         bump(0.2, 0.45, 0.15, 0.008, x, y) + bump(0.15, 0.75, 0.75, 0.02, x, y);
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("grwalk-test-" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace oracle
