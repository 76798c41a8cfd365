#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "grwalk/dictionary.hpp"
#include "grwalk/graphon.hpp"
#include "grwalk/io.hpp"
#include "grwalk/kernels.hpp"
#include "grwalk/sampling.hpp"

namespace grwalk {

enum class CovarianceSource { empirical, quadrature };

/// Uncentred (cross-)covariances of the dictionary under the x- and y-marginals.
struct CovarianceSet {
  Matrix xx;
  Matrix xy;
  Matrix yy;
  Matrix yx;
  std::size_t samples = 0;
  CovarianceSource source = CovarianceSource::empirical;
};

/// C_xx = (1/m) sum phi(x) phi(x)^T, C_xy = (1/m) sum phi(x) phi(y)^T, and the y analogues.
/// Warns when m < n.
CovarianceSet empirical_covariances(const Dictionary& d, const PairedData& pd,
                                    kernels::Backend backend = kernels::Backend::parallel);

enum class QuadratureWeight { invariant, uniform };

/// Galerkin integrals by midpoint quadrature on a grid x grid table of p:
/// [C_xx]_ij = int phi_i phi_j mu, [C_xy]_ij = int phi_i (K phi_j) mu, [C_yy] against the
/// pushed-forward density nu = P mu, C_yx = C_xy^T. The invariant weight mu = pi requires
/// a symmetric graphon.
CovarianceSet quadrature_covariances(const Graphon& g, const Dictionary& d, QuadratureWeight weight,
                                     int grid = 1000);

/// Galerkin matrices K = (C_xx + eps I)^-1 C_xy, T = (C_yy + eps I)^-1 C_yx and F = K T.
struct OperatorMatrices {
  Matrix koopman;
  Matrix reweighted_pf;
  Matrix forward_backward;
  /// Regularised Gram matrices used in the solves (and for normalising eigenvectors).
  Matrix xx;
  Matrix yy;
  Matrix xy;
  Matrix yx;
  double epsilon = 0.0;
  /// C_xy symmetric and C_xx == C_yy (symmetrised data or quadrature with pi weight).
  bool self_adjoint = false;
};

/// 1e-10 * trace(C_xx) / n.
double default_regularization(const CovarianceSet& cs);

/// Throws SingularMatrixError if a Cholesky factorisation fails.
OperatorMatrices galerkin_matrices(const CovarianceSet& cs, std::optional<double> epsilon = std::nullopt);

enum class OperatorKind { koopman, reweighted_pf, forward_backward };
enum class SpectralMode { eigen, singular };

struct SpectralModel {
  SpectralMode mode = SpectralMode::eigen;
  OperatorKind op = OperatorKind::koopman;
  /// Full spectrum of the decomposed matrix, sorted (eigen: by real part, conjugate
  /// pairs adjacent with positive imaginary part first; singular: eigenvalues of F).
  std::vector<std::complex<double>> eigenvalues;
  /// Singular mode: sigma_l = sqrt(max(lambda_l(F), 0)) for the full spectrum.
  Vector singular_values;
  /// n x r coefficient vectors: eigenvectors xi_l (eigen) / right singular v_l = xi_l.
  /// A conjugate pair occupies two columns (real part, imaginary part).
  Matrix right;
  /// Singular mode: left singular coefficients u_l = lambda_l^(-1/2) T xi_l.
  Matrix left;
  Dictionary dictionary;
  /// pi~ (symmetric) or mu~ (asymmetric); may be empty.
  ScalarFunction density;
  /// nu~ (asymmetric); may be empty.
  ScalarFunction target_density;

  int rank() const { return static_cast<int>(right.cols()); }
  /// Real parts (eigen) or singular values, full spectrum.
  Vector values() const;

  double right_function(int l, double x) const;
  double left_function(int l, double x) const;
  /// Right functions 0..r-1 evaluated at xs: |xs| x r.
  Matrix right_functions(std::span<const double> xs, int r) const;
  Matrix left_functions(std::span<const double> xs, int r) const;

  /// Values, coefficient vectors, dictionary descriptor and the densities sampled on a
  /// 1000-point midpoint grid.
  Json to_json() const;
  static SpectralModel from_json(const Json& j);
};

/// Scales each column so that xi^T gram xi = 1 and its largest-magnitude entry is positive.
void normalize_coefficients(Matrix& coefficients, const Matrix& gram);

/// Dominant eigenpairs of K, T or F, keeping r_max (plus a trailing conjugate partner).
/// Self-adjoint data use the generalised symmetric-definite solver; otherwise a general
/// dense eigen-solver. Throws ConvergenceError.
SpectralModel eigendecompose(const OperatorMatrices& om, OperatorKind which, int r_max,
                             const Dictionary& dictionary);

/// SVD of T via the eigendecomposition of F (symmetric-definite pencil
/// C_xy C_yy^-1 C_yx xi = lambda C_xx xi). Negative lambda are clamped to zero with a
/// warning. Throws RankError if lambda_l < 1e-12 for some l <= r_max.
SpectralModel singular_decompose(const OperatorMatrices& om, int r_max, const Dictionary& dictionary);

/// Number of leading eigenvalues of F at or above the rank floor 1e-12.
int numerical_rank(const SpectralModel& sm);

inline constexpr double kRankFloor = 1e-12;

/// phi^_l(x) = pi~(x) phi_l(x) for l = 0..rank-1 (eigen mode).
std::vector<ScalarFunction> pf_eigenfunctions(const SpectralModel& sm, const ScalarFunction& density);

/// 1 - lambda_l for every eigenvalue (random-walk normalised graphon Laplacian).
std::vector<std::complex<double>> laplacian_spectrum(const SpectralModel& sm);

}  // namespace grwalk
