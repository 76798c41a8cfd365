#include "grwalk/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace grwalk::kernels {

Matrix tabulate(const std::function<double(double, double)>& f, std::span<const double> xs,
                std::span<const double> ys, Backend backend) {
  const auto rows = static_cast<Eigen::Index>(xs.size());
  const auto cols = static_cast<Eigen::Index>(ys.size());
  Matrix out(rows, cols);
  if (backend == Backend::serial) {
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = f(xs[i], ys[j]);
    return out;
  }
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = f(xs[i], ys[j]);
  return out;
}

Matrix evaluate_columns(const std::function<void(double, double*)>& f, Eigen::Index rows,
                        std::span<const double> points, Backend backend) {
  const auto cols = static_cast<Eigen::Index>(points.size());
  Matrix out(rows, cols);
  if (backend == Backend::serial) {
    for (Eigen::Index k = 0; k < cols; ++k) f(points[k], out.col(k).data());
    return out;
  }
#pragma omp parallel for schedule(static)
  for (Eigen::Index k = 0; k < cols; ++k) f(points[k], out.col(k).data());
  return out;
}

Matrix cross_moment(const Matrix& a, const Matrix& b, Backend backend) {
  const Eigen::Index n = a.rows();
  const Eigen::Index p = b.rows();
  const Eigen::Index m = a.cols();
  Matrix out = Matrix::Zero(n, p);
  if (m == 0) return out;

  if (backend == Backend::serial) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < p; ++j) {
        double s = 0.0;
        for (Eigen::Index k = 0; k < m; ++k) s += a(i, k) * b(j, k);
        out(i, j) = s / static_cast<double>(m);
      }
    return out;
  }

  const Eigen::Index chunks = (m + kReductionChunk - 1) / kReductionChunk;
  std::vector<Matrix> partial(static_cast<std::size_t>(chunks));
#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < chunks; ++c) {
    const Eigen::Index begin = c * kReductionChunk;
    const Eigen::Index len = std::min(kReductionChunk, m - begin);
    partial[static_cast<std::size_t>(c)].noalias() =
        a.middleCols(begin, len) * b.middleCols(begin, len).transpose();
  }
  for (const auto& part : partial) out += part;
  out /= static_cast<double>(m);
  return out;
}

namespace {

double kde_at(std::span<const double> s, double h, double x, Boundary boundary) {
  const double cutoff = 8.0 * h;
  const double inv2h2 = 1.0 / (2.0 * h * h);
  auto window_sum = [&](double centre) {
    // Sum over samples within the cutoff of centre.
    auto lo = std::lower_bound(s.begin(), s.end(), centre - cutoff);
    auto hi = std::upper_bound(lo, s.end(), centre + cutoff);
    double acc = 0.0;
    for (auto it = lo; it != hi; ++it) {
      const double d = centre - *it;
      acc += std::exp(-d * d * inv2h2);
    }
    return acc;
  };
  double total = window_sum(x);
  if (boundary == Boundary::reflect) {
    // Images at -s and 2 - s: evaluate the mirrored query instead.
    total += window_sum(-x);
    total += window_sum(2.0 - x);
  } else {
    total += window_sum(x - 1.0);
    total += window_sum(x + 1.0);
  }
  const double norm = 1.0 / (static_cast<double>(s.size()) * h * std::sqrt(2.0 * std::numbers::pi));
  return total * norm;
}

}  // namespace

Vector kde_evaluate(std::span<const double> sorted_samples, double bandwidth,
                    std::span<const double> points, Boundary boundary, Backend backend) {
  const auto count = static_cast<Eigen::Index>(points.size());
  Vector out(count);
  if (backend == Backend::serial) {
    for (Eigen::Index i = 0; i < count; ++i)
      out[i] = kde_at(sorted_samples, bandwidth, points[i], boundary);
    return out;
  }
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < count; ++i)
    out[i] = kde_at(sorted_samples, bandwidth, points[i], boundary);
  return out;
}

std::vector<int> nearest_center(const Matrix& points, const Matrix& centers, Backend backend) {
  const Eigen::Index m = points.rows();
  std::vector<int> labels(static_cast<std::size_t>(m));
  auto assign = [&](Eigen::Index i) {
    int best = 0;
    double best_d = (points.row(i) - centers.row(0)).squaredNorm();
    for (Eigen::Index c = 1; c < centers.rows(); ++c) {
      const double d = (points.row(i) - centers.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
  };
  if (backend == Backend::serial) {
    for (Eigen::Index i = 0; i < m; ++i) assign(i);
    return labels;
  }
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < m; ++i) assign(i);
  return labels;
}

}  // namespace grwalk::kernels
