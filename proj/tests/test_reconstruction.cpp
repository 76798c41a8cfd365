#include <doctest.h>

#include <cmath>

#include "grwalk/density.hpp"
#include "grwalk/error.hpp"
#include "grwalk/pipeline.hpp"
#include "grwalk/reconstruction.hpp"
#include "support.hpp"

using namespace grwalk;

namespace {

constexpr int kQuadratureGrid = 1000;

/// Quadrature spectral model with the exact invariant density attached.
SpectralModel quadrature_model(const Graphon& g, const Dictionary& d, int r_max, std::optional<double> eps = {}) {
  const auto om = galerkin_matrices(quadrature_covariances(g, d, QuadratureWeight::invariant, kQuadratureGrid), eps);
  SpectralModel sm = eigendecompose(om, OperatorKind::koopman, r_max, d);
  sm.density = invariant_density(degree_profile(g, kQuadratureGrid));
  return sm;
}

double exact_z(const Graphon& g) { return invariant_density(degree_profile(g, kQuadratureGrid)).Z; }

/// True p on the midpoint grid, with the out-degree from the quadrature grid.
Matrix true_p(const oracle::Kernel& w, int grid) {
  Matrix p(grid, grid);
  for (int i = 0; i < grid; ++i) {
    const double x = oracle::node(i, grid);
    double d = 0.0;
    for (int a = 0; a < kQuadratureGrid; ++a) d += w(x, oracle::node(a, kQuadratureGrid));
    d /= kQuadratureGrid;
    for (int j = 0; j < grid; ++j) p(i, j) = w(x, oracle::node(j, grid)) / d;
  }
  return p;
}

Graphon doubled_triple_peak() {
  return Graphon("triple-peak x2", CustomKernel{[](double x, double y) { return 2.0 * oracle::triple_peak(x, y); }},
                 true);
}

}  // namespace

TEST_CASE("constant graphon: rank one reproduces p and w exactly") {
  const Graphon g = builtin::constant(0.5);
  const SpectralModel sm = quadrature_model(g, make_indicator(4), 4, 0.0);
  const RankRModel model = truncate(sm, 1, exact_z(g));
  const KernelTable p = reconstruct_p_symmetric(model);
  const KernelTable w = reconstruct_w(model);
  CHECK((p.values.array() - 1.0).abs().maxCoeff() < 1e-12);
  CHECK((w.values.array() - 0.5).abs().maxCoeff() < 1e-12);
  CHECK(row_normalization_report(p).max < 1e-12);
  CHECK(p.negative_mass == 0.0);
}

TEST_CASE("quadrature reconstruction error is non-increasing in r") {
  const Matrix truth = true_p(oracle::triple_peak, kReconstructionGrid);
  for (const Dictionary& d : {make_gaussian(20, 0.05), make_indicator(100)}) {
    const SpectralModel sm = quadrature_model(builtin::triple_peak(), d, 10);
    double previous = std::numeric_limits<double>::infinity();
    for (int r = 1; r <= 8; ++r) {
      const double err = relative_l2_error(reconstruct_p_symmetric(truncate(sm, r)).values, truth);
      CAPTURE(r);
      CHECK(err <= previous * (1.0 + 1e-9));
      previous = err;
    }
  }
}

TEST_CASE("scaling the graphon changes w only through Z") {
  const auto d = make_gaussian(20, 0.05);
  const Graphon base = builtin::triple_peak();
  const Graphon doubled = doubled_triple_peak();
  const SpectralModel a = quadrature_model(base, d, 5);
  const SpectralModel b = quadrature_model(doubled, d, 5);
  CHECK(exact_z(doubled) == doctest::Approx(2.0 * exact_z(base)).epsilon(1e-12));
  const RankRModel ma = truncate(a, 3, exact_z(base));
  const RankRModel mb = truncate(b, 3, exact_z(doubled));
  const Matrix pa = reconstruct_p_symmetric(ma).values;
  const Matrix pb = reconstruct_p_symmetric(mb).values;
  CHECK((pa - pb).cwiseAbs().maxCoeff() < 1e-10 * pa.cwiseAbs().maxCoeff());
  const Matrix wa = reconstruct_w(ma).values;
  const Matrix wb = reconstruct_w(mb).values;
  CHECK((2.0 * wa - wb).cwiseAbs().maxCoeff() < 1e-10 * wb.cwiseAbs().maxCoeff());
}

TEST_CASE("the stationary term is the invariant density") {
  const Graphon g = builtin::triple_peak();
  const SpectralModel sm = quadrature_model(g, make_indicator(100), 3);
  CHECK(sm.eigenvalues[0].real() == doctest::Approx(1.0).epsilon(1e-9));
  const KernelTable p1 = reconstruct_p_symmetric(truncate(sm, 1));
  const auto pi = invariant_density(degree_profile(g, kQuadratureGrid));
  double worst = 0.0;
  for (Eigen::Index i = 0; i < p1.values.rows(); ++i)
    for (Eigen::Index j = 0; j < p1.values.cols(); ++j)
      worst = std::max(worst, std::abs(p1.values(i, j) - pi(p1.nodes[j])));
  CHECK(worst < 1e-8);
}

TEST_CASE("full-rank quadrature reconstruction is row-stochastic") {
  const Graphon g = builtin::triple_peak();
  const SpectralModel sm = quadrature_model(g, make_indicator(50), 50, 0.0);
  const KernelTable p = reconstruct_p_symmetric(truncate(sm, 50), kQuadratureGrid);
  CHECK(row_normalization_report(p).max < 1e-6);
}

TEST_CASE("data pipeline: rank-3 triple-peak rows integrate to about one") {
  RunConfig cfg;
  cfg.graphon = "triple-peak";
  Json meta;
  const Trajectory t = acquire(cfg, meta);
  const Analysis a = analyze(t, cfg);
  REQUIRE(a.r == 3);
  const ReconstructionSet rs = reconstruct(a.spectral, 3, kReconstructionGrid);
  const RowNormalization rn = row_normalization_report(rs.p);
  // The worst rows sit at the edges of [0,1], where few samples constrain the fit.
  const Eigen::Index edge = kReconstructionGrid / 20;
  const double interior = rn.deviation.segment(edge, kReconstructionGrid - 2 * edge).maxCoeff();
  MESSAGE("row normalisation: max " << rn.max << ", interior max " << interior << ", mean " << rn.mean);
  CHECK(rn.mean < 0.1);
  CHECK(interior < 0.1);
  CHECK(rn.max < 0.5);
  REQUIRE(rs.w.has_value());
}

TEST_CASE("asymmetric full-rank quadrature reproduces the cell-averaged kernel") {
  constexpr int n = 10;
  const Graphon g = builtin::quadruple_peak();
  const Dictionary d = make_indicator(n);
  const CovarianceSet cs = quadrature_covariances(g, d, QuadratureWeight::uniform, kQuadratureGrid);
  const OperatorMatrices om = galerkin_matrices(cs, 0.0);
  // The kernel is a sum of four separable bumps, so the remaining singular values vanish.
  const int rank = numerical_rank(singular_decompose(om, 1, d));
  CHECK(rank == 4);
  SpectralModel sm = singular_decompose(om, rank, d);

  // Oracle: average p over cells directly from the kernel formula.
  const Matrix p = oracle::grid_operator(oracle::quadruple_peak, kQuadratureGrid) * kQuadratureGrid;
  const Vector nu = p.colwise().mean().transpose();
  const Vector nodes = MidpointGrid{kQuadratureGrid}.nodes();
  sm.density = [](double) { return 1.0; };
  sm.target_density = interpolate_grid(nodes, nu);
  const KernelTable table = reconstruct_p_asymmetric(truncate(sm, rank), kQuadratureGrid);

  const int cell = kQuadratureGrid / n;
  Matrix block(n, n);
  Vector nu_mass(n);
  for (int j = 0; j < n; ++j) nu_mass[j] = nu.segment(j * cell, cell).sum() / kQuadratureGrid;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      block(i, j) = p.block(i * cell, j * cell, cell, cell).sum() / (cell * double(kQuadratureGrid)) / nu_mass[j];
  Matrix expected(kQuadratureGrid, kQuadratureGrid);
  for (int a = 0; a < kQuadratureGrid; ++a)
    for (int b = 0; b < kQuadratureGrid; ++b) expected(a, b) = block(a / cell, b / cell) * nu[b];
  CHECK(relative_l2_error(table.values, expected) < 1e-8);
  CHECK(row_normalization_report(table).max < 1e-8);
}

TEST_CASE("negative values are reported, not clipped") {
  const Graphon g = builtin::triple_peak();
  const SpectralModel sm = quadrature_model(g, make_gaussian(20, 0.05), 3);
  const KernelTable w2 = reconstruct_w(truncate(sm, 2, exact_z(g)));
  CHECK(w2.minimum < 0.0);
  CHECK(w2.minimum == w2.values.minCoeff());
  CHECK(w2.negative_mass > 0.0);
  CHECK(w2.negative_mass < 1.0);
}

TEST_CASE("truncation guards") {
  const SpectralModel sm = quadrature_model(builtin::triple_peak(), make_gaussian(20, 0.05), 3);
  CHECK_THROWS_AS(truncate(sm, 0), ConfigError);
  CHECK_THROWS_AS(truncate(sm, sm.rank() + 1), ConfigError);
  SpectralModel bare = sm;
  bare.density = nullptr;
  CHECK_THROWS_AS(truncate(bare, 2), ConfigError);
  CHECK_THROWS_AS(reconstruct_p_asymmetric(truncate(sm, 2)), ConfigError);
}

TEST_CASE("kernel table sidecar") {
  const Graphon g = builtin::triple_peak();
  const SpectralModel sm = quadrature_model(g, make_gaussian(20, 0.05), 3);
  const RankRModel model = truncate(sm, 3, exact_z(g));
  const auto dir = oracle::scratch_dir("reconstruction");
  const KernelTable p = reconstruct_p_symmetric(model, 50);
  write_kernel_table(dir / "p.csv", p, model, "p");
  const Matrix back = read_matrix_csv(dir / "p.csv");
  CHECK((back - p.values).cwiseAbs().maxCoeff() < 1e-12);
  const Json j = read_json(dir / "p.csv.json");
  CHECK(j["quantity"] == "p");
  CHECK(j["r"] == 3);
  CHECK(j["mode"] == "symmetric-eigen");
  CHECK(j["values"].size() == 3);
  CHECK(j["normalization"].get<double>() == doctest::Approx(model.normalization));
  CHECK(j["grid"] == 50);
  CHECK(j.contains("negative_mass"));
  CHECK(j["row_normalization"].contains("max"));

  write_kernel_table(dir / "w.csv", reconstruct_w(model, 50), model, "w");
  CHECK_FALSE(read_json(dir / "w.csv.json").contains("row_normalization"));
}
