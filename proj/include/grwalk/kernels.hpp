#pragma once

// Data-parallel inner loops. Every kernel has a plain serial reference that the
// tests compare against; the OpenMP variants produce results independent of the
// thread count (reductions run over fixed-size chunks summed in index order).

#include <functional>
#include <span>
#include <vector>

#include "grwalk/types.hpp"

namespace grwalk::kernels {

enum class Backend { serial, parallel };

/// Column chunk of the parallel cross-moment reduction.
inline constexpr Eigen::Index kReductionChunk = 2048;

/// out(i, j) = f(xs[i], ys[j]).
Matrix tabulate(const std::function<double(double, double)>& f, std::span<const double> xs,
                std::span<const double> ys, Backend backend = Backend::parallel);

/// out(:, k) = f(points[k]) with f filling a column of length rows.
Matrix evaluate_columns(const std::function<void(double, double*)>& f, Eigen::Index rows,
                        std::span<const double> points, Backend backend = Backend::parallel);

/// (1/m) sum_k a(:,k) b(:,k)^T for n x m sample tables.
Matrix cross_moment(const Matrix& a, const Matrix& b, Backend backend = Backend::parallel);

enum class Boundary { reflect, periodic };

/// Gaussian kernel density sum at each point. samples must be sorted ascending.
Vector kde_evaluate(std::span<const double> sorted_samples, double bandwidth,
                    std::span<const double> points, Boundary boundary,
                    Backend backend = Backend::parallel);

/// Index of the nearest centre (squared Euclidean, lowest index on ties) for each row.
std::vector<int> nearest_center(const Matrix& points, const Matrix& centers,
                                Backend backend = Backend::parallel);

}  // namespace grwalk::kernels
