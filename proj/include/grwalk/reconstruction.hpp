#pragma once

#include "grwalk/io.hpp"
#include "grwalk/operators.hpp"

namespace grwalk {

/// Leading r components of a spectral model, ready for low-rank kernel sums.
struct RankRModel {
  int r = 1;
  SpectralMode mode = SpectralMode::eigen;
  /// lambda_1..lambda_r (eigen) or sigma_1..sigma_r (singular).
  Vector values;
  Matrix right;
  Matrix left;
  Dictionary dictionary;
  /// pi~ (eigen) or the x-marginal (singular).
  ScalarFunction density;
  /// nu~ (singular).
  ScalarFunction target_density;
  /// Z~; 1 unless the normalisation is known exactly.
  double normalization = 1.0;
};

/// Throws ConfigError if r is out of range, a required density is missing or, in
/// eigen mode, one of the leading r eigenvalues is complex.
RankRModel truncate(const SpectralModel& sm, int r, double normalization = 1.0);

inline constexpr int kReconstructionGrid = 200;

struct KernelTable {
  /// values(i, j) = k(x_i, x_j) on the midpoint grid.
  Matrix values;
  Vector nodes;
  /// Sum of |negative entries| over sum of |entries|; 0 for a non-negative table.
  double negative_mass = 0.0;
  double minimum = 0.0;
};

/// p_r(x, y) = sum_l lambda_l phi_l(x) phi_l(y) pi~(y).
KernelTable reconstruct_p_symmetric(const RankRModel& model, int grid = kReconstructionGrid,
                                    kernels::Backend backend = kernels::Backend::parallel);
/// w_r(x, y) = Z~ sum_l lambda_l pi~(x) phi_l(x) pi~(y) phi_l(y).
KernelTable reconstruct_w(const RankRModel& model, int grid = kReconstructionGrid,
                          kernels::Backend backend = kernels::Backend::parallel);
/// p_r(x, y) = sum_l sigma_l v_l(x) u_l(y) nu~(y).
KernelTable reconstruct_p_asymmetric(const RankRModel& model, int grid = kReconstructionGrid,
                                     kernels::Backend backend = kernels::Backend::parallel);

struct RowNormalization {
  /// |int p_r(x_i, y) dy - 1| per grid row.
  Vector deviation;
  double max = 0.0;
  double mean = 0.0;
};

RowNormalization row_normalization_report(const KernelTable& table);

/// ||a - b||_F / ||b||_F.
double relative_l2_error(const Matrix& a, const Matrix& b);
/// Relative error after the least-squares scalar fit s a ~ b; s is returned through scale.
double scale_fitted_error(const Matrix& a, const Matrix& b, double* scale = nullptr);

/// Table as CSV plus <path>.json with r, mode, values, Z~, negativity and row sums.
void write_kernel_table(const std::filesystem::path& path, const KernelTable& table, const RankRModel& model,
                        const std::string& quantity);

}  // namespace grwalk
