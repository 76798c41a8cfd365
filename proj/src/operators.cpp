#include "grwalk/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "grwalk/density.hpp"
#include "grwalk/diagnostics.hpp"
#include "grwalk/error.hpp"

namespace grwalk {
namespace {

using Complex = std::complex<double>;

std::span<const double> as_span(const std::vector<double>& v) { return {v.data(), v.size()}; }
std::span<const double> as_span(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

bool nearly_equal(const Matrix& a, const Matrix& b, double rel) {
  const double scale = std::max({a.norm(), b.norm(), 1e-300});
  return (a - b).norm() <= rel * scale;
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// Sort key: real part descending, then imaginary part descending so that a
// conjugate pair appears as (a + bi, a - bi).
std::vector<Eigen::Index> spectral_order(const Eigen::VectorXcd& ev) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(ev.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (ev[a].real() != ev[b].real()) return ev[a].real() > ev[b].real();
    return ev[a].imag() > ev[b].imag();
  });
  return idx;
}

bool is_real(Complex z) { return std::abs(z.imag()) <= 1e-14 * std::max(1.0, std::abs(z.real())); }

struct SymmetricPencil {
  Vector values;  // descending
  Matrix vectors; // gram-orthonormal columns
};

// B xi = lambda A xi with A symmetric positive definite.
SymmetricPencil solve_pencil(const Matrix& b, const Matrix& a) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(symmetrized(b), symmetrized(a),
                                                       Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (ges.info() != Eigen::Success) throw ConvergenceError("generalised symmetric eigen-solver did not converge");
  const Eigen::Index n = a.rows();
  SymmetricPencil out{Vector(n), Matrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values[i] = ges.eigenvalues()[n - 1 - i];
    out.vectors.col(i) = ges.eigenvectors().col(n - 1 - i);
  }
  return out;
}

void fix_sign(Eigen::Ref<Vector> v) {
  Eigen::Index at = 0;
  v.cwiseAbs().maxCoeff(&at);
  if (v[at] < 0.0) v = -v;
}

}  // namespace

CovarianceSet empirical_covariances(const Dictionary& d, const PairedData& pd, kernels::Backend backend) {
  if (pd.x.size() != pd.y.size()) throw ConfigError("empirical_covariances: x and y sample counts differ");
  if (pd.x.empty()) throw ConfigError("empirical_covariances: no samples");
  if (pd.x.size() < static_cast<std::size_t>(d.size())) {
    std::ostringstream os;
    os << "empirical_covariances: m = " << pd.x.size() << " samples for n = " << d.size()
       << " basis functions; covariance matrices will be rank deficient";
    warn(os.str());
  }
  const Matrix px = d.evaluate(as_span(pd.x), backend);
  const Matrix py = d.evaluate(as_span(pd.y), backend);
  CovarianceSet cs;
  cs.xx = kernels::cross_moment(px, px, backend);
  cs.xy = kernels::cross_moment(px, py, backend);
  cs.yy = kernels::cross_moment(py, py, backend);
  cs.yx = cs.xy.transpose();
  cs.samples = pd.x.size();
  cs.source = CovarianceSource::empirical;
  return cs;
}

CovarianceSet quadrature_covariances(const Graphon& g, const Dictionary& d, QuadratureWeight weight, int grid) {
  if (weight == QuadratureWeight::invariant && !g.symmetric())
    throw SymmetryError("quadrature_covariances: invariant-density weight requires a symmetric graphon");
  const DegreeProfile dp = degree_profile(g, grid);
  const TransitionDensity td(dp);
  const Matrix p = td.table();
  const double h = MidpointGrid{grid}.weight();

  Vector mu;
  if (weight == QuadratureWeight::invariant) {
    mu = invariant_density(dp).on_grid();
  } else {
    mu = Vector::Ones(grid);
  }
  const Matrix phi = d.evaluate(as_span(dp.nodes));    // n x G
  const Matrix k_phi = (p * h) * phi.transpose();        // G x n, (K phi_j)(x_a)
  const Vector nu = (p.transpose() * mu) * h;            // pushed-forward density

  CovarianceSet cs;
  const Matrix weighted = phi * (mu * h).asDiagonal();
  cs.xx = weighted * phi.transpose();
  cs.xy = weighted * k_phi;
  cs.yy = phi * (nu * h).asDiagonal() * phi.transpose();
  cs.yx = cs.xy.transpose();
  cs.samples = static_cast<std::size_t>(grid);
  cs.source = CovarianceSource::quadrature;
  return cs;
}

double default_regularization(const CovarianceSet& cs) {
  return 1e-10 * cs.xx.trace() / static_cast<double>(cs.xx.rows());
}

OperatorMatrices galerkin_matrices(const CovarianceSet& cs, std::optional<double> epsilon) {
  const Eigen::Index n = cs.xx.rows();
  if (cs.xy.rows() != n || cs.yy.rows() != n || cs.yx.rows() != n)
    throw ConfigError("galerkin_matrices: covariance shapes differ");
  OperatorMatrices om;
  om.epsilon = epsilon ? *epsilon : default_regularization(cs);
  if (om.epsilon < 0.0) throw ConfigError("galerkin_matrices: regularisation must be >= 0");
  om.xx = cs.xx + om.epsilon * Matrix::Identity(n, n);
  om.yy = cs.yy + om.epsilon * Matrix::Identity(n, n);
  om.xy = cs.xy;
  om.yx = cs.yx;

  Eigen::LLT<Matrix> llt_x(om.xx);
  if (llt_x.info() != Eigen::Success)
    throw SingularMatrixError("Cholesky factorisation of C_xx + eps I failed (eps = " + format_double(om.epsilon) + ")");
  Eigen::LLT<Matrix> llt_y(om.yy);
  if (llt_y.info() != Eigen::Success)
    throw SingularMatrixError("Cholesky factorisation of C_yy + eps I failed (eps = " + format_double(om.epsilon) + ")");

  om.koopman = llt_x.solve(cs.xy);
  om.reweighted_pf = llt_y.solve(cs.yx);
  om.forward_backward = om.koopman * om.reweighted_pf;
  if (!om.koopman.allFinite() || !om.reweighted_pf.allFinite())
    throw SingularMatrixError("Galerkin solve produced non-finite entries");
  om.self_adjoint = nearly_equal(cs.xy, cs.xy.transpose(), 1e-12) && nearly_equal(cs.xx, cs.yy, 1e-12);
  return om;
}

void normalize_coefficients(Matrix& coefficients, const Matrix& gram) {
  for (Eigen::Index l = 0; l < coefficients.cols(); ++l) {
    auto col = coefficients.col(l);
    const double norm2 = col.dot(gram * col);
    if (norm2 > 0.0) col /= std::sqrt(norm2);
    fix_sign(col);
  }
}

Vector SpectralModel::values() const {
  if (mode == SpectralMode::singular) return singular_values;
  Vector v(static_cast<Eigen::Index>(eigenvalues.size()));
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) v[static_cast<Eigen::Index>(i)] = eigenvalues[i].real();
  return v;
}

double SpectralModel::right_function(int l, double x) const { return right.col(l).dot(dictionary.evaluate(x)); }

double SpectralModel::left_function(int l, double x) const {
  if (mode != SpectralMode::singular) throw ConfigError("left singular functions need a singular-mode model");
  return left.col(l).dot(dictionary.evaluate(x));
}

Matrix SpectralModel::right_functions(std::span<const double> xs, int r) const {
  if (r > rank()) throw ConfigError("right_functions: r exceeds available components");
  return dictionary.evaluate(xs).transpose() * right.leftCols(r);
}

Matrix SpectralModel::left_functions(std::span<const double> xs, int r) const {
  if (mode != SpectralMode::singular) throw ConfigError("left singular functions need a singular-mode model");
  if (r > left.cols()) throw ConfigError("left_functions: r exceeds available components");
  return dictionary.evaluate(xs).transpose() * left.leftCols(r);
}

SpectralModel eigendecompose(const OperatorMatrices& om, OperatorKind which, int r_max, const Dictionary& dictionary) {
  const Eigen::Index n = om.koopman.rows();
  if (r_max < 1 || r_max > n) throw ConfigError("eigendecompose: r_max must lie in [1, n]");
  SpectralModel sm;
  sm.mode = SpectralMode::eigen;
  sm.op = which;
  sm.dictionary = dictionary;
  const Matrix& gram = which == OperatorKind::reweighted_pf ? om.yy : om.xx;

  const bool symmetric_route = which == OperatorKind::forward_backward || om.self_adjoint;
  if (symmetric_route) {
    Matrix b;
    switch (which) {
      case OperatorKind::koopman: b = om.xy; break;
      case OperatorKind::reweighted_pf: b = om.yx; break;
      case OperatorKind::forward_backward: b = om.xy * om.yy.llt().solve(om.yx); break;
    }
    SymmetricPencil pencil = solve_pencil(b, gram);
    for (Eigen::Index i = 0; i < n; ++i) sm.eigenvalues.emplace_back(pencil.values[i], 0.0);
    sm.right = pencil.vectors.leftCols(r_max);
    normalize_coefficients(sm.right, gram);
    return sm;
  }

  const Matrix& a = which == OperatorKind::koopman ? om.koopman : om.reweighted_pf;
  Eigen::EigenSolver<Matrix> es(a, true);
  if (es.info() != Eigen::Success) throw ConvergenceError("dense eigen-solver did not converge");
  const Eigen::VectorXcd ev = es.eigenvalues();
  const Eigen::MatrixXcd vecs = es.eigenvectors();
  const auto order = spectral_order(ev);
  for (auto i : order) sm.eigenvalues.push_back(ev[i]);

  Eigen::Index keep = r_max;
  if (keep < n && !is_real(sm.eigenvalues[keep - 1]) && sm.eigenvalues[keep - 1].imag() > 0.0) ++keep;
  sm.right.resize(n, keep);
  for (Eigen::Index c = 0; c < keep; ++c) {
    const Complex lambda = sm.eigenvalues[c];
    Eigen::VectorXcd v = vecs.col(order[c]);
    if (is_real(lambda)) {
      Vector re = v.real();
      if (re.norm() == 0.0) re = v.imag();
      sm.right.col(c) = re;
      continue;
    }
    if (lambda.imag() < 0.0 && c > 0 && std::abs(sm.eigenvalues[c - 1] - std::conj(lambda)) == 0.0) {
      continue;  // filled together with its partner
    }
    // Complex: scale to unit gram-norm, rotate so the largest entry is real positive.
    const double norm2 = (v.real().dot(gram * v.real()) + v.imag().dot(gram * v.imag()));
    v /= std::sqrt(norm2);
    Eigen::Index at = 0;
    v.cwiseAbs().maxCoeff(&at);
    v *= std::conj(v[at]) / std::abs(v[at]);
    sm.right.col(c) = v.real();
    if (c + 1 < keep) sm.right.col(c + 1) = v.imag();
  }
  // Real columns only; complex pairs were normalised above.
  for (Eigen::Index c = 0; c < keep; ++c) {
    if (is_real(sm.eigenvalues[c])) {
      auto col = sm.right.col(c);
      const double norm2 = col.dot(gram * col);
      if (norm2 > 0.0) col /= std::sqrt(norm2);
      fix_sign(col);
    }
  }
  return sm;
}

SpectralModel singular_decompose(const OperatorMatrices& om, int r_max, const Dictionary& dictionary) {
  const Eigen::Index n = om.koopman.rows();
  if (r_max < 1 || r_max > n) throw ConfigError("singular_decompose: r_max must lie in [1, n]");
  const Matrix b = om.xy * om.yy.llt().solve(om.yx);
  SymmetricPencil pencil = solve_pencil(b, om.xx);

  SpectralModel sm;
  sm.mode = SpectralMode::singular;
  sm.op = OperatorKind::forward_backward;
  sm.dictionary = dictionary;
  sm.singular_values.resize(n);
  bool clamped = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lambda = pencil.values[i];
    sm.eigenvalues.emplace_back(lambda, 0.0);
    if (lambda < -kRankFloor) clamped = true;
    sm.singular_values[i] = std::sqrt(std::max(lambda, 0.0));
  }
  if (clamped) warn("singular_decompose: negative eigenvalues of F clamped to zero");

  for (Eigen::Index l = 0; l < r_max; ++l) {
    if (pencil.values[l] < kRankFloor) {
      std::ostringstream os;
      os << "singular_decompose: lambda_" << (l + 1) << "(F) = " << pencil.values[l]
         << " is below the rank floor; request at most " << l << " components";
      throw RankError(os.str());
    }
  }
  sm.right = pencil.vectors.leftCols(r_max);
  normalize_coefficients(sm.right, om.xx);
  sm.left = om.reweighted_pf * sm.right;
  for (Eigen::Index l = 0; l < r_max; ++l) sm.left.col(l) /= std::sqrt(pencil.values[l]);
  return sm;
}

int numerical_rank(const SpectralModel& sm) {
  int r = 0;
  for (const auto& z : sm.eigenvalues) {
    if (z.real() < kRankFloor) break;
    ++r;
  }
  return r;
}

std::vector<ScalarFunction> pf_eigenfunctions(const SpectralModel& sm, const ScalarFunction& density) {
  if (sm.mode != SpectralMode::eigen) throw ConfigError("pf_eigenfunctions needs an eigen-mode model");
  if (!density) throw ConfigError("pf_eigenfunctions needs a density estimate");
  std::vector<ScalarFunction> out;
  for (int l = 0; l < sm.rank(); ++l) {
    Vector coeff = sm.right.col(l);
    Dictionary dict = sm.dictionary;
    out.emplace_back([coeff, dict, density](double x) { return density(x) * coeff.dot(dict.evaluate(x)); });
  }
  return out;
}

std::vector<std::complex<double>> laplacian_spectrum(const SpectralModel& sm) {
  if (sm.mode != SpectralMode::eigen) throw ConfigError("laplacian_spectrum needs an eigen-mode model");
  std::vector<std::complex<double>> out;
  out.reserve(sm.eigenvalues.size());
  for (const auto& z : sm.eigenvalues) out.push_back(1.0 - z);
  return out;
}

namespace {

const char* op_name(OperatorKind k) {
  switch (k) {
    case OperatorKind::koopman: return "koopman";
    case OperatorKind::reweighted_pf: return "reweighted-pf";
    case OperatorKind::forward_backward: return "forward-backward";
  }
  return "?";
}

OperatorKind op_from_name(const std::string& s) {
  if (s == "koopman") return OperatorKind::koopman;
  if (s == "reweighted-pf") return OperatorKind::reweighted_pf;
  if (s == "forward-backward") return OperatorKind::forward_backward;
  throw ParseError("unknown operator '" + s + "' in spectral model");
}

constexpr int kDensityGrid = 1000;

}  // namespace

Json SpectralModel::to_json() const {
  Json j;
  j["mode"] = mode == SpectralMode::eigen ? "eigen" : "singular";
  j["operator"] = op_name(op);
  Json ev = Json::array();
  for (const auto& z : eigenvalues) ev.push_back({z.real(), z.imag()});
  j["eigenvalues"] = ev;
  if (mode == SpectralMode::singular) j["singular_values"] = grwalk::to_json(singular_values);
  j["right"] = grwalk::to_json(right);
  if (mode == SpectralMode::singular) j["left"] = grwalk::to_json(left);
  j["dictionary"] = dictionary.descriptor();
  if (density || target_density) {
    const Vector nodes = MidpointGrid{kDensityGrid}.nodes();
    Json dg;
    dg["x"] = grwalk::to_json(nodes);
    auto sample = [&](const ScalarFunction& f) {
      Vector v(nodes.size());
      for (Eigen::Index i = 0; i < nodes.size(); ++i) v[i] = f(nodes[i]);
      return grwalk::to_json(v);
    };
    if (density) dg["density"] = sample(density);
    if (target_density) dg["target_density"] = sample(target_density);
    j["density_grid"] = dg;
  }
  return j;
}

SpectralModel SpectralModel::from_json(const Json& j) {
  SpectralModel sm;
  try {
    sm.mode = j.at("mode").get<std::string>() == "singular" ? SpectralMode::singular : SpectralMode::eigen;
    sm.op = op_from_name(j.at("operator").get<std::string>());
    for (const auto& z : j.at("eigenvalues")) sm.eigenvalues.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
    if (j.contains("singular_values")) sm.singular_values = vector_from_json(j.at("singular_values"));
    sm.right = matrix_from_json(j.at("right"));
    if (j.contains("left")) sm.left = matrix_from_json(j.at("left"));
    sm.dictionary = Dictionary::from_descriptor(j.at("dictionary"));
    if (j.contains("density_grid")) {
      const auto& dg = j.at("density_grid");
      const Vector nodes = vector_from_json(dg.at("x"));
      if (dg.contains("density")) sm.density = interpolate_grid(nodes, vector_from_json(dg.at("density")));
      if (dg.contains("target_density"))
        sm.target_density = interpolate_grid(nodes, vector_from_json(dg.at("target_density")));
    }
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed spectral model: ") + e.what());
  }
  return sm;
}

}  // namespace grwalk
