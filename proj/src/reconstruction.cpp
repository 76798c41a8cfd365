#include "grwalk/reconstruction.hpp"

#include <cmath>

#include "grwalk/error.hpp"
#include "grwalk/sampling.hpp"

namespace grwalk {
namespace {

struct Factors {
  Matrix left;   // G x r, row i = weights at x_i (values folded in)
  Matrix right;  // G x r
};

Vector sample(const ScalarFunction& f, const Vector& nodes) {
  Vector v(nodes.size());
  for (Eigen::Index i = 0; i < nodes.size(); ++i) v[i] = f(nodes[i]);
  return v;
}

KernelTable assemble(const Factors& f, const Vector& nodes, kernels::Backend backend) {
  const Eigen::Index g = nodes.size();
  KernelTable t;
  t.nodes = nodes;
  t.values.resize(g, g);
  const Matrix rt = f.right.transpose();
  const bool parallel = backend == kernels::Backend::parallel;
#pragma omp parallel for schedule(static) if (parallel)
  for (Eigen::Index i = 0; i < g; ++i) t.values.row(i) = f.left.row(i) * rt;
  double neg = 0.0, total = 0.0;
  for (Eigen::Index j = 0; j < g; ++j)
    for (Eigen::Index i = 0; i < g; ++i) {
      const double v = t.values(i, j);
      total += std::abs(v);
      if (v < 0.0) neg -= v;
    }
  t.negative_mass = total > 0.0 ? neg / total : 0.0;
  t.minimum = t.values.minCoeff();
  return t;
}

Matrix functions_on(const Dictionary& d, const Matrix& coeffs, const Vector& nodes) {
  return d.evaluate(std::span<const double>(nodes.data(), static_cast<std::size_t>(nodes.size()))).transpose() *
         coeffs;
}

void require_mode(const RankRModel& m, SpectralMode mode, const char* op) {
  if (m.mode != mode)
    throw ConfigError(std::string(op) + ": model is in " +
                      (m.mode == SpectralMode::eigen ? "eigen" : "singular") + " mode");
}

}  // namespace

RankRModel truncate(const SpectralModel& sm, int r, double normalization) {
  if (r < 1 || r > sm.rank()) throw ConfigError("truncate: r must lie in [1, available components]");
  RankRModel m;
  m.r = r;
  m.mode = sm.mode;
  m.dictionary = sm.dictionary;
  m.density = sm.density;
  m.target_density = sm.target_density;
  m.normalization = normalization;
  m.right = sm.right.leftCols(r);
  m.values.resize(r);
  if (sm.mode == SpectralMode::singular) {
    m.left = sm.left.leftCols(r);
    m.values = sm.singular_values.head(r);
    if (!m.target_density) throw ConfigError("truncate: singular-mode reconstruction needs nu~");
  } else {
    for (int l = 0; l < r; ++l) {
      const auto z = sm.eigenvalues[static_cast<std::size_t>(l)];
      if (std::abs(z.imag()) > 1e-8 * std::max(1.0, std::abs(z)))
        throw ConfigError("truncate: eigenvalue " + std::to_string(l + 1) +
                          " is complex; symmetric reconstruction needs real components");
      m.values[l] = z.real();
    }
    if (!m.density) throw ConfigError("truncate: eigen-mode reconstruction needs pi~");
  }
  return m;
}

KernelTable reconstruct_p_symmetric(const RankRModel& model, int grid, kernels::Backend backend) {
  require_mode(model, SpectralMode::eigen, "reconstruct_p_symmetric");
  const Vector nodes = MidpointGrid{grid}.nodes();
  const Matrix phi = functions_on(model.dictionary, model.right, nodes);
  const Vector pi = sample(model.density, nodes);
  return assemble({phi * model.values.asDiagonal(), pi.asDiagonal() * phi}, nodes, backend);
}

KernelTable reconstruct_w(const RankRModel& model, int grid, kernels::Backend backend) {
  require_mode(model, SpectralMode::eigen, "reconstruct_w");
  const Vector nodes = MidpointGrid{grid}.nodes();
  const Vector pi = sample(model.density, nodes);
  const Matrix phi_hat = pi.asDiagonal() * functions_on(model.dictionary, model.right, nodes);
  return assemble({model.normalization * phi_hat * model.values.asDiagonal(), phi_hat}, nodes, backend);
}

KernelTable reconstruct_p_asymmetric(const RankRModel& model, int grid, kernels::Backend backend) {
  require_mode(model, SpectralMode::singular, "reconstruct_p_asymmetric");
  const Vector nodes = MidpointGrid{grid}.nodes();
  const Matrix v = functions_on(model.dictionary, model.right, nodes);
  const Matrix u = functions_on(model.dictionary, model.left, nodes);
  const Vector nu = sample(model.target_density, nodes);
  return assemble({v * model.values.asDiagonal(), nu.asDiagonal() * u}, nodes, backend);
}

RowNormalization row_normalization_report(const KernelTable& table) {
  RowNormalization r;
  const double h = 1.0 / static_cast<double>(table.values.cols());
  r.deviation = ((table.values.rowwise().sum() * h).array() - 1.0).abs().matrix();
  r.max = r.deviation.size() ? r.deviation.maxCoeff() : 0.0;
  r.mean = r.deviation.size() ? r.deviation.mean() : 0.0;
  return r;
}

double relative_l2_error(const Matrix& a, const Matrix& b) { return (a - b).norm() / b.norm(); }

double scale_fitted_error(const Matrix& a, const Matrix& b, double* scale) {
  const double s = a.cwiseProduct(b).sum() / a.squaredNorm();
  if (scale) *scale = s;
  return relative_l2_error(s * a, b);
}

void write_kernel_table(const std::filesystem::path& path, const KernelTable& table, const RankRModel& model,
                        const std::string& quantity) {
  write_matrix_csv(path, table.values);
  Json j;
  j["quantity"] = quantity;
  j["r"] = model.r;
  j["mode"] = model.mode == SpectralMode::eigen ? "symmetric-eigen" : "asymmetric-svd";
  j["values"] = to_json(model.values);
  j["normalization"] = model.normalization;
  j["grid"] = table.nodes.size();
  j["negative_mass"] = table.negative_mass;
  j["minimum"] = table.minimum;
  if (quantity == "p") {
    const RowNormalization rn = row_normalization_report(table);
    j["row_normalization"] = {{"max", rn.max}, {"mean", rn.mean}};
  }
  write_json(sidecar_path(path), j);
}

}  // namespace grwalk
