#include "grwalk/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "grwalk/diagnostics.hpp"
#include "grwalk/error.hpp"
#include "grwalk/kernels.hpp"
#include "grwalk/rng.hpp"

namespace grwalk {

Embedding embed(const SpectralModel& sm, std::span<const double> coordinates, int r, bool periodic) {
  if (r < 1 || r > sm.rank()) throw ConfigError("embed: r must lie in [1, available components]");
  Embedding e;
  e.rows = sm.right_functions(coordinates, r);
  e.coordinates.assign(coordinates.begin(), coordinates.end());
  e.periodic = periodic;
  return e;
}

Embedding embed(const SpectralModel& sm, const Trajectory& t, int r) {
  return embed(sm, std::span<const double>(t.states.data(), t.states.size()), r, t.periodic);
}

GapResult detect_gap(std::span<const double> v, int r_max) {
  if (v.size() < 2) throw ConfigError("detect_gap: need at least two spectral values");
  const int upper = std::min<int>(r_max, static_cast<int>(v.size()));
  GapResult g;
  double best = -std::numeric_limits<double>::infinity();
  for (int r = 1; r < std::max(upper, 2); ++r) {
    const double gap = v[r - 1] - v[r];
    if (gap > best) {
      best = gap;
      g.r = r;
    }
  }
  g.ratio = v[g.r - 1] != 0.0 ? v[g.r] / v[g.r - 1] : 1.0;
  g.no_clear_gap = g.ratio > kGapWarningRatio;
  if (g.no_clear_gap) {
    std::ostringstream os;
    os << "no clear spectral gap (v_" << g.r + 1 << " / v_" << g.r << " = " << g.ratio << ")";
    warn(os.str());
  }
  return g;
}

namespace {

struct Run {
  bool ok = false;
  std::vector<int> labels;
  Matrix centers;
  double inertia = 0.0;
};

Matrix seed_centers(const Matrix& pts, int r, Rng& rng) {
  const Eigen::Index m = pts.rows();
  Matrix centers(r, pts.cols());
  centers.row(0) = pts.row(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(m))));
  Vector d2 = (pts.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < r; ++c) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      const double u = rng.uniform() * total;
      double acc = 0.0;
      pick = m - 1;
      for (Eigen::Index i = 0; i < m; ++i) {
        acc += d2[i];
        if (acc > u) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(m)));
    }
    centers.row(c) = pts.row(pick);
    d2 = d2.cwiseMin((pts.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

Run lloyd(const Matrix& pts, int r, Rng rng, int max_iterations) {
  Run run;
  run.centers = seed_centers(pts, r, rng);
  run.labels = kernels::nearest_center(pts, run.centers, kernels::Backend::serial);
  for (int it = 0; it < max_iterations; ++it) {
    Matrix sums = Matrix::Zero(r, pts.cols());
    std::vector<Eigen::Index> counts(static_cast<std::size_t>(r), 0);
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      sums.row(run.labels[i]) += pts.row(i);
      ++counts[run.labels[i]];
    }
    for (int c = 0; c < r; ++c) {
      if (counts[c] == 0) return run;  // ok == false
      run.centers.row(c) = sums.row(c) / static_cast<double>(counts[c]);
    }
    auto next = kernels::nearest_center(pts, run.centers, kernels::Backend::serial);
    if (next == run.labels) break;
    run.labels = std::move(next);
  }
  run.inertia = 0.0;
  for (Eigen::Index i = 0; i < pts.rows(); ++i) run.inertia += (pts.row(i) - run.centers.row(run.labels[i])).squaredNorm();
  run.ok = true;
  return run;
}

double cluster_position(const std::vector<double>& xs, bool periodic) {
  if (!periodic) return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double s = 0.0, c = 0.0;
  for (double x : xs) {
    s += std::sin(2.0 * std::numbers::pi * x);
    c += std::cos(2.0 * std::numbers::pi * x);
  }
  double t = std::atan2(s, c) / (2.0 * std::numbers::pi);
  if (t < 0.0) t += 1.0;
  return t;
}

struct Arc {
  double start;
  double length;
};

// Smallest arc on the unit circle holding every point: complement of the widest gap.
Arc covering_arc(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  double widest = 1.0 - xs.back() + xs.front();
  std::size_t after = 0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (xs[i] - xs[i - 1] > widest) {
      widest = xs[i] - xs[i - 1];
      after = i;
    }
  }
  return {xs[after], 1.0 - widest};
}

std::vector<double> interval_boundaries(const std::vector<std::vector<double>>& members) {
  std::vector<double> cuts;
  for (std::size_t c = 0; c + 1 < members.size(); ++c) {
    const double hi = *std::max_element(members[c].begin(), members[c].end());
    const double lo = *std::min_element(members[c + 1].begin(), members[c + 1].end());
    if (!(hi < lo)) return {};
    cuts.push_back(0.5 * (hi + lo));
  }
  return cuts;
}

std::vector<double> arc_boundaries(const std::vector<std::vector<double>>& members) {
  if (members.size() < 2) return {};
  std::vector<Arc> arcs;
  for (const auto& m : members) arcs.push_back(covering_arc(m));
  std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) { return a.start < b.start; });
  std::vector<double> cuts;
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const Arc& a = arcs[i];
    const Arc& b = arcs[(i + 1) % arcs.size()];
    double spacing = b.start - a.start;
    if (spacing <= 0.0) spacing += 1.0;
    if (!(a.length < spacing)) return {};
    double cut = a.start + a.length + 0.5 * (spacing - a.length);
    cut -= std::floor(cut);
    cuts.push_back(cut);
  }
  std::sort(cuts.begin(), cuts.end());
  return cuts;
}

}  // namespace

int ClusterModel::label_of(double x) const {
  auto it = std::lower_bound(lookup_.begin(), lookup_.end(), std::pair<double, int>{x, -1});
  if (it == lookup_.end() || it->first != x)
    throw DomainError("cluster model: coordinate " + format_double(x) + " was not clustered");
  return it->second;
}

ClusterModel kmeans(const Embedding& e, int r, const KMeansOptions& options) {
  const Eigen::Index m = e.rows.rows();
  if (r < 1) throw ConfigError("kmeans: r must be >= 1");
  if (m < r) throw ConfigError("kmeans: fewer points than clusters");
  if (options.restarts < 1) throw ConfigError("kmeans: restarts must be >= 1");
  if (static_cast<std::size_t>(m) != e.coordinates.size())
    throw ConfigError("kmeans: embedding rows and coordinates differ in length");

  std::vector<Run> runs(static_cast<std::size_t>(options.restarts));
  const Rng root(options.seed);
#pragma omp parallel for schedule(static)
  for (int k = 0; k < options.restarts; ++k)
    runs[static_cast<std::size_t>(k)] = lloyd(e.rows, r, root.substream(static_cast<std::uint64_t>(k)),
                                              options.max_iterations);

  int best = -1;
  for (int k = 0; k < options.restarts; ++k) {
    const auto& run = runs[static_cast<std::size_t>(k)];
    if (run.ok && (best < 0 || run.inertia < runs[static_cast<std::size_t>(best)].inertia)) best = k;
  }
  if (best < 0)
    throw EmptyClusterError("kmeans: a cluster emptied in every restart; reduce r or change the seed");
  Run& chosen = runs[static_cast<std::size_t>(best)];

  // Canonical order: by mean coordinate of the members.
  std::vector<std::vector<double>> members(static_cast<std::size_t>(r));
  for (Eigen::Index i = 0; i < m; ++i) members[chosen.labels[i]].push_back(e.coordinates[i]);
  std::vector<double> position(static_cast<std::size_t>(r));
  for (int c = 0; c < r; ++c) position[c] = cluster_position(members[c], e.periodic);
  std::vector<int> order(static_cast<std::size_t>(r));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return position[a] < position[b]; });
  std::vector<int> new_label(static_cast<std::size_t>(r));
  for (int c = 0; c < r; ++c) new_label[order[c]] = c;

  ClusterModel cm;
  cm.periodic = e.periodic;
  cm.inertia = chosen.inertia;
  cm.restart = best;
  cm.coordinates = e.coordinates;
  cm.labels.resize(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) cm.labels[i] = new_label[chosen.labels[i]];
  cm.centers.resize(r, e.rows.cols());
  std::vector<std::vector<double>> ordered(static_cast<std::size_t>(r));
  for (int c = 0; c < r; ++c) {
    cm.centers.row(c) = chosen.centers.row(order[c]);
    ordered[c] = std::move(members[order[c]]);
  }
  cm.boundaries = e.periodic ? arc_boundaries(ordered) : interval_boundaries(ordered);
  if (r > 1 && cm.boundaries.empty())
    warn("kmeans: clusters are not contiguous on [0,1]; boundaries omitted, labels only");

  cm.lookup_.reserve(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) cm.lookup_.emplace_back(e.coordinates[i], cm.labels[i]);
  std::sort(cm.lookup_.begin(), cm.lookup_.end());
  return cm;
}

Matrix cluster_transitions(const ClusterModel& cm, const PairedData& pd) {
  const int r = cm.clusters();
  Matrix counts = Matrix::Zero(r, r);
  for (std::size_t k = 0; k < pd.size(); ++k) counts(cm.label_of(pd.x[k]), cm.label_of(pd.y[k])) += 1.0;
  for (int i = 0; i < r; ++i) {
    const double total = counts.row(i).sum();
    if (total == 0.0)
      throw EmptyClusterError("cluster_transitions: cluster " + std::to_string(i + 1) + " has no outgoing pairs");
    counts.row(i) /= total;
  }
  return counts;
}

}  // namespace grwalk
