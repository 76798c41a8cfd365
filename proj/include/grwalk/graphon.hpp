#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "grwalk/types.hpp"

namespace grwalk {

/// amplitude * exp(-(|x - cx|^power + |y - cy|^power) / scale)
struct Bump {
  double amplitude = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  double power = 2.0;
  double scale = 1.0;
};

struct BumpSum {
  std::vector<Bump> bumps;
};

/// G x G cell values; row = x cell, column = y cell; piecewise constant.
struct GridKernel {
  Matrix values;
};

/// Block-constant kernel on the partition 0 = edges[0] < ... < edges[K] = 1.
struct BlockKernel {
  std::vector<double> edges;
  Matrix values;
};

struct CustomKernel {
  std::function<double(double, double)> fn;
};

using GraphonRepresentation = std::variant<BumpSum, GridKernel, BlockKernel, CustomKernel>;

/// Kernel w: [0,1]^2 -> [0,1]. Immutable and cheap to copy.
class Graphon {
 public:
  Graphon(std::string name, GraphonRepresentation representation, bool symmetric);

  double operator()(double x, double y) const;

  const std::string& name() const { return name_; }
  bool symmetric() const { return symmetric_; }
  const GraphonRepresentation& representation() const { return *representation_; }

  /// Checks 0 <= w <= 1 and, when flagged symmetric, |w(x,y) - w(y,x)| <= 1e-12 on a
  /// grid x grid sample. Throws DomainError / SymmetryError.
  void validate(int grid = 101) const;

 private:
  std::string name_;
  std::shared_ptr<const GraphonRepresentation> representation_;
  bool symmetric_;
};

namespace builtin {
Graphon triple_peak();
Graphon quadruple_peak();
Graphon two_block(double on_diagonal, double off_diagonal);
Graphon constant(double c);
Graphon bipartite();
/// Two diagonal blocks of weight a with zero cross mass.
Graphon block_diagonal(double a = 1.0);
}  // namespace builtin

/// Resolves "triple-peak", "quadruple-peak", "bipartite", "constant(c)",
/// "two-block(a,b)", "block-diagonal(a)". Throws ConfigError.
Graphon parse_builtin(std::string_view spec);

/// w~(x,y) = c(x) w(x,y); the result is flagged asymmetric.
Graphon row_scaled(const Graphon& base, std::function<double(double)> c, std::string name);

/// Samples w at the cell centres of a G x G grid (G x G values).
Matrix sample_grid(const Graphon& g, int grid);

Graphon load_grid_csv(const std::filesystem::path& path, bool symmetric);
void save_grid_csv(const Graphon& g, int grid, const std::filesystem::path& path);

struct DegreeProfile {
  Graphon graphon;
  int grid_size = 0;
  Vector nodes;
  Vector d_in;
  Vector d_out;
  double d0 = 0.0;

  /// Midpoint quadrature of w(x, .) at an arbitrary x, on the profile's grid.
  double out_degree(double x) const;
  double in_degree(double x) const;
};

inline constexpr double kDegreeFloor = 1e-6;

/// Throws DegeneracyError if any grid value of d_out is <= 1e-6.
DegreeProfile degree_profile(const Graphon& g, int grid = 2000);

/// p(x, y) = w(x, y) / d_out(x).
class TransitionDensity {
 public:
  explicit TransitionDensity(DegreeProfile degrees);

  /// Costs one out-degree quadrature per call; prefer row() for batches.
  double operator()(double x, double y) const;
  /// p(x, ys[j]) for all j, sharing the d_out(x) evaluation.
  Vector row(double x, const Vector& ys) const;
  /// p on the G x G midpoint grid using the tabulated degrees.
  Matrix table() const;

  const Graphon& graphon() const { return degrees_.graphon; }
  const DegreeProfile& degrees() const { return degrees_; }
  int grid_size() const { return degrees_.grid_size; }
  double upper_bound() const { return 1.0 / degrees_.d0; }

 private:
  DegreeProfile degrees_;
};

TransitionDensity transition_density(const Graphon& g, const DegreeProfile& dp);

/// pi(x) = d(x) / Z, Z = int d.
struct InvariantDensity {
  DegreeProfile degrees;
  double Z = 0.0;

  double operator()(double x) const { return degrees.out_degree(x) / Z; }
  Vector on_grid() const { return degrees.d_out / Z; }
};

/// Throws SymmetryError unless the underlying graphon is flagged symmetric.
InvariantDensity invariant_density(const DegreeProfile& dp);

struct ConnectednessReport {
  bool connected = true;
  int grid_size = 0;
  /// Cells of one component not reaching the rest; empty when connected.
  std::vector<int> witness_cells;
};

/// Necessary-condition probe: support graph of the G x G grid (cell i ~ j iff
/// w(x_i, x_j) > 0 or w(x_j, x_i) > 0) must be connected. Not a measure-theoretic test.
ConnectednessReport connectedness_probe(const Graphon& g, int grid);

}  // namespace grwalk
