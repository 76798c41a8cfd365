#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "grwalk/operators.hpp"
#include "grwalk/sampling.hpp"

namespace grwalk {

/// Row i = [f_1(x_i) ... f_r(x_i)] for the right eigen-/singular functions.
struct Embedding {
  Matrix rows;
  std::vector<double> coordinates;  // x_i, kept for relabelling and boundaries
  bool periodic = false;

  int dimension() const { return static_cast<int>(rows.cols()); }
};

/// Evaluates the first r right functions of sm at every state of t.
Embedding embed(const SpectralModel& sm, const Trajectory& t, int r);
Embedding embed(const SpectralModel& sm, std::span<const double> coordinates, int r, bool periodic);

struct GapResult {
  int r = 1;
  /// v_{r+1} / v_r
  double ratio = 0.0;
  /// Set when ratio > 0.8.
  bool no_clear_gap = false;
};

inline constexpr double kGapWarningRatio = 0.8;

/// r = argmax_{1 <= r < min(r_max, count)} (v_r - v_{r+1}); ties go to the smaller r.
GapResult detect_gap(std::span<const double> sorted_values, int r_max);

struct KMeansOptions {
  std::uint64_t seed = 7;
  int restarts = 10;
  int max_iterations = 100;
};

struct ClusterModel {
  /// 0-based labels, ordered by the (circular, if periodic) mean coordinate of each cluster.
  std::vector<int> labels;
  Matrix centers;
  /// Sorted cut points on [0,1]; empty when some cluster is not an interval (arc).
  std::vector<double> boundaries;
  double inertia = 0.0;
  std::vector<double> coordinates;
  bool periodic = false;
  int restart = 0;

  int clusters() const { return static_cast<int>(centers.rows()); }
  /// Label of a coordinate that was part of the clustered set. Throws DomainError otherwise.
  int label_of(double x) const;

 private:
  friend ClusterModel kmeans(const Embedding&, int, const KMeansOptions&);
  std::vector<std::pair<double, int>> lookup_;
};

/// Lloyd's algorithm with k-means++ seeding over independent restarts (run
/// concurrently on per-restart RNG substreams); the lowest objective wins, ties to
/// the lowest restart index. Throws EmptyClusterError if every restart loses a cluster.
ClusterModel kmeans(const Embedding& e, int r, const KMeansOptions& options = {});

/// c_ij = #(x in i, y in j) / #(x in i); throws EmptyClusterError for a cluster
/// without outgoing pairs.
Matrix cluster_transitions(const ClusterModel& cm, const PairedData& pd);

}  // namespace grwalk
