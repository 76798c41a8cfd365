#include "grwalk/sampling.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "grwalk/error.hpp"
#include "grwalk/rng.hpp"

namespace grwalk {
namespace {

// Inverse-transform draw from the piecewise-constant density whose cell masses
// are proportional to w(x, y_j) (cells of width 1/G on [0,1]).
class RowSampler {
 public:
  RowSampler(const Graphon& g, int grid)
      : graphon_(g), grid_(grid), nodes_(MidpointGrid{grid}.nodes()), row_(grid), cdf_(grid + 1) {
    // Bumps factor as f(x) g(y): tabulate the y factors once.
    if (const auto* sum = std::get_if<BumpSum>(&g.representation())) {
      bumps_ = sum->bumps;
      y_factors_.resize(grid, static_cast<Eigen::Index>(bumps_.size()));
      for (std::size_t b = 0; b < bumps_.size(); ++b)
        for (int j = 0; j < grid; ++j)
          y_factors_(j, static_cast<Eigen::Index>(b)) =
              std::exp(-std::pow(std::abs(nodes_[j] - bumps_[b].cy), bumps_[b].power) / bumps_[b].scale);
    }
  }

  double draw(double x, Rng& rng) {
    fill_row(x);
    cdf_[0] = 0.0;
    for (int j = 0; j < grid_; ++j) cdf_[j + 1] = cdf_[j] + row_[j];
    const double total = cdf_[grid_];
    if (!(total > 0.0)) throw DegeneracyError("random walk: zero out-degree at x = " + std::to_string(x));
    const double u = rng.uniform() * total;
    const auto it = std::upper_bound(cdf_.begin() + 1, cdf_.end(), u);
    const auto j = std::min<std::ptrdiff_t>(it - cdf_.begin() - 1, grid_ - 1);
    const double lo = cdf_[j], hi = cdf_[j + 1];
    const double frac = hi > lo ? (u - lo) / (hi - lo) : 0.5;
    return (static_cast<double>(j) + std::clamp(frac, 0.0, 1.0)) / grid_;
  }

  double draw_rejection(double x, Rng& rng) {
    fill_row(x);
    const double envelope = row_.maxCoeff();
    if (!(envelope > 0.0)) throw DegeneracyError("random walk: zero out-degree at x = " + std::to_string(x));
    for (;;) {
      const double y = rng.uniform();
      if (rng.uniform() * envelope < graphon_(x, y)) return y;
    }
  }

 private:
  void fill_row(double x) {
    if (bumps_.empty()) {
      for (int j = 0; j < grid_; ++j) row_[j] = graphon_(x, nodes_[j]);
      return;
    }
    Vector x_factors(static_cast<Eigen::Index>(bumps_.size()));
    for (std::size_t b = 0; b < bumps_.size(); ++b)
      x_factors[static_cast<Eigen::Index>(b)] =
          bumps_[b].amplitude * std::exp(-std::pow(std::abs(x - bumps_[b].cx), bumps_[b].power) / bumps_[b].scale);
    row_.noalias() = y_factors_ * x_factors;
  }

  const Graphon& graphon_;
  int grid_;
  Vector nodes_;
  Vector row_;
  std::vector<double> cdf_;
  std::vector<Bump> bumps_;
  Matrix y_factors_;
};

double to_unit_angle(double x1, double x2) {
  double t = (std::atan2(x2, x1) + std::numbers::pi) / (2.0 * std::numbers::pi);
  if (t >= 1.0) t -= 1.0;
  return t;
}

}  // namespace

Trajectory walk(const TransitionDensity& td, std::size_t m, std::uint64_t seed, const WalkOptions& options) {
  if (m < 1) throw ConfigError("walk: step count must be >= 1");
  if (options.grid < 2) throw ConfigError("walk: sampling grid must be >= 2");
  if (options.burn_in < 0) throw ConfigError("walk: burn-in must be >= 0");
  const Graphon& g = td.graphon();
  Rng rng(seed);
  RowSampler sampler(g, options.grid);

  Trajectory t;
  t.seed = seed;
  t.source = g.name();
  t.states.reserve(m + 1);
  double x = options.initial ? *options.initial : rng.uniform();
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("walk: initial state outside [0,1]");
  const std::size_t total = m + 1 + static_cast<std::size_t>(options.burn_in);
  for (std::size_t k = 0; k < total; ++k) {
    if (k >= static_cast<std::size_t>(options.burn_in)) t.states.push_back(x);
    if (k + 1 == total) break;
    x = options.method == SamplerMethod::inverse_transform ? sampler.draw(x, rng) : sampler.draw_rejection(x, rng);
  }
  return t;
}

int SdeConfig::substeps() const {
  if (wells < 1) throw ConfigError("sde: well count must be positive");
  if (drift[0] != 0.0 || drift[3] != 0.0 || drift[1] + drift[2] != 0.0)
    throw ConfigError("sde: drift matrix M must be antisymmetric (M + M^T = 0)");
  if (!(beta > 0.0) || !(lag > 0.0) || !(dt > 0.0)) throw ConfigError("sde: beta, lag and dt must be positive");
  if (dt > lag) throw ConfigError("sde: dt must not exceed the lag time");
  const double ratio = lag / dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * ratio) throw ConfigError("sde: lag / dt must be an integer");
  if (burn_in < 0) throw ConfigError("sde: burn-in must be >= 0");
  return static_cast<int>(rounded);
}

std::array<double, 2> SdeConfig::initial_point() const {
  if (initial) return *initial;
  const double angle = std::numbers::pi / wells;
  return {std::cos(angle), std::sin(angle)};
}

std::array<double, 2> lemon_slice_gradient(int wells, double x1, double x2) {
  const double r2 = x1 * x1 + x2 * x2;
  const double r = std::sqrt(r2);
  const double theta = std::atan2(x2, x1);
  const double dv_dtheta = -wells * std::sin(wells * theta);
  const double dv_dr = 20.0 * (r - 1.0);
  return {dv_dr * x1 / r - dv_dtheta * x2 / r2, dv_dr * x2 / r + dv_dtheta * x1 / r2};
}

Trajectory sde_walk(const SdeConfig& cfg, std::size_t m, std::uint64_t seed) {
  if (m < 1) throw ConfigError("sde_walk: step count must be >= 1");
  const int sub = cfg.substeps();
  Rng rng(seed);
  auto [x1, x2] = cfg.initial_point();
  const double noise = std::sqrt(2.0 / cfg.beta * cfg.dt);
  const auto& M = cfg.drift;

  Trajectory t;
  t.seed = seed;
  t.periodic = true;
  std::ostringstream src;
  src << "lemon-slice(k=" << cfg.wells << ",beta=" << cfg.beta << ",tau=" << cfg.lag << ",dt=" << cfg.dt << ")";
  t.source = src.str();
  t.states.reserve(m + 1);
  const std::size_t total = m + 1 + static_cast<std::size_t>(cfg.burn_in);
  for (std::size_t k = 0; k < total; ++k) {
    if (k >= static_cast<std::size_t>(cfg.burn_in)) t.states.push_back(to_unit_angle(x1, x2));
    if (k + 1 == total) break;
    for (int s = 0; s < sub; ++s) {
      const auto [g1, g2] = lemon_slice_gradient(cfg.wells, x1, x2);
      const double f1 = -g1 + M[0] * g1 + M[1] * g2;
      const double f2 = -g2 + M[2] * g1 + M[3] * g2;
      const double n1 = rng.normal();
      const double n2 = rng.normal();
      x1 += f1 * cfg.dt + noise * n1;
      x2 += f2 * cfg.dt + noise * n2;
    }
  }
  return t;
}

PairedData pairs(const Trajectory& t, bool symmetrize) {
  if (t.states.size() < 2) throw ConfigError("pairs: trajectory needs at least two states");
  PairedData pd;
  const std::size_t m = t.states.size() - 1;
  pd.x.assign(t.states.begin(), t.states.end() - 1);
  pd.y.assign(t.states.begin() + 1, t.states.end());
  if (symmetrize) {
    pd.x.reserve(2 * m);
    pd.y.reserve(2 * m);
    for (std::size_t k = 0; k < m; ++k) {
      pd.x.push_back(t.states[k + 1]);
      pd.y.push_back(t.states[k]);
    }
  }
  return pd;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p += ".json";
  return p;
}

void write_trajectory(const std::filesystem::path& path, const Trajectory& t, const Json& extra_metadata) {
  {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
    out << "x\n";
    for (double v : t.states) out << format_double(v) << '\n';
  }
  Json meta = {{"seed", t.seed}, {"m", t.steps()}, {"source", t.source}, {"periodic", t.periodic}};
  for (const auto& [k, v] : extra_metadata.items()) meta[k] = v;
  write_json(sidecar_path(path), meta);
}

Trajectory read_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  Trajectory t;
  t.source = path.filename().string();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (lineno == 1 && line == "x") continue;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc() || ptr != line.data() + line.size())
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": non-numeric state '" + line + "'");
    if (!(v >= 0.0 && v <= 1.0))
      throw DomainError(path.string() + ":" + std::to_string(lineno) + ": state " + line + " outside [0,1]");
    t.states.push_back(v);
  }
  if (t.states.size() < 2) throw ParseError(path.string() + ": trajectory needs at least two states");
  const auto side = sidecar_path(path);
  if (std::filesystem::exists(side)) {
    const Json meta = read_json(side);
    t.seed = meta.value("seed", std::uint64_t{0});
    t.source = meta.value("source", t.source);
    t.periodic = meta.value("periodic", false);
  }
  return t;
}

}  // namespace grwalk
