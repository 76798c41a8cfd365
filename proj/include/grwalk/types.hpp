#pragma once

#include <Eigen/Dense>
#include <functional>

namespace grwalk {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Evaluable real function on [0,1] (densities, eigenfunctions).
using ScalarFunction = std::function<double(double)>;

/// Composite-midpoint rule on [0,1]: nodes (i + 1/2)/size, equal weights 1/size.
struct MidpointGrid {
  int size = 0;

  double node(int i) const { return (i + 0.5) / size; }
  double weight() const { return 1.0 / size; }
  Vector nodes() const {
    Vector v(size);
    for (int i = 0; i < size; ++i) v[i] = node(i);
    return v;
  }
};

}  // namespace grwalk
