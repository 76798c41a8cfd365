#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "grwalk/clustering.hpp"
#include "grwalk/dictionary.hpp"
#include "grwalk/error.hpp"
#include "grwalk/io.hpp"
#include "grwalk/operators.hpp"
#include "grwalk/reconstruction.hpp"
#include "grwalk/sampling.hpp"

namespace grwalk {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr const char* kOutputDirEnv = "GRWALK_OUTPUT_DIR";

enum class Pipeline { symmetric, asymmetric };

/// Time-ordered real series with the min-max map onto [0,1].
struct SignalSeries {
  std::string name;
  std::vector<double> raw;
  double min = 0.0;
  double max = 1.0;

  double scale(double v) const { return (v - min) / (max - min); }
  double unscale(double s) const { return min + s * (max - min); }
  std::vector<double> scaled() const;
};

/// Reads one column (0-based index or header name; default: last column) of a CSV file.
/// A first line whose selected field is not numeric is a header. Blank lines are skipped.
/// Throws ParseError (with the line number) for non-numeric rows and DomainError for
/// fewer than 10 rows or a constant series.
SignalSeries ingest_signal(const std::filesystem::path& path, const std::string& column = "");

/// "gaussian(n,sigma)" or "indicator(n)"; periodic is applied to gaussian dictionaries.
Dictionary parse_dictionary(std::string_view spec, bool periodic);

/// Pipeline configuration. Every field has a plain-text key; files hold "key = value"
/// lines with '#' comments.
struct RunConfig {
  Pipeline pipeline = Pipeline::symmetric;
  /// Builtin graphon name, or "lemon-slice" for the SDE.
  std::string graphon;
  std::filesystem::path graphon_csv;
  bool graphon_csv_symmetric = true;
  std::filesystem::path signal;
  std::string column;
  std::string dictionary = "gaussian(20,0.05)";
  std::size_t m = 20000;
  std::uint64_t seed = 1;
  int burn_in = 100;
  /// Unset: true for signals with the symmetric pipeline, false otherwise.
  std::optional<bool> symmetrize;
  /// Unset: chosen by the spectral gap.
  std::optional<int> r;
  int r_max = 10;
  std::optional<double> epsilon;
  SamplerMethod sampler = SamplerMethod::inverse_transform;
  int sde_wells = 5;
  double sde_beta = 2.0;
  double sde_lag = 0.1;
  double sde_dt = 0.005;
  int kmeans_restarts = 10;
  int reconstruction_grid = kReconstructionGrid;
  std::filesystem::path output = "grwalk-run";

  /// Throws ConfigError for unknown keys or malformed values.
  void set(std::string_view key, std::string_view value);
  /// Canonical key/value listing; set() on every entry reproduces the config.
  std::vector<std::pair<std::string, std::string>> entries() const;

  static RunConfig parse(std::string_view text);
  static RunConfig load(const std::filesystem::path& path);
  /// Restores the config echoed into a manifest.
  static RunConfig from_manifest(const Json& manifest);
  std::string to_text() const;
  Json to_json() const;

  /// Exactly one data source; symmetrize only with the symmetric pipeline. Throws ConfigError.
  void validate() const;
  bool symmetrize_pairs() const;
  bool uses_sde() const { return graphon == "lemon-slice"; }
};

/// Output directory after applying the GRWALK_OUTPUT_DIR override.
std::filesystem::path resolve_output_dir(const RunConfig& cfg);

/// Simulates or ingests the trajectory described by cfg. metadata receives provenance
/// (scaling for signals).
Trajectory acquire(const RunConfig& cfg, Json& metadata);

struct Analysis {
  CovarianceSet covariances;
  OperatorMatrices operators;
  SpectralModel spectral;
  GapResult gap;
  int r = 1;
  ClusterModel clusters;
  Matrix transitions;
};

/// Pairs -> covariances -> Galerkin matrices -> spectral model -> gap -> k-means -> transitions.
Analysis analyze(const Trajectory& t, const RunConfig& cfg);

struct ReconstructionSet {
  RankRModel model;
  KernelTable p;
  std::optional<KernelTable> w;
};

/// Rank-r tables: p and w (symmetric) or p (asymmetric). Z~ = 1.
ReconstructionSet reconstruct(const SpectralModel& sm, int r, int grid);

void write_analysis(const std::filesystem::path& dir, const Trajectory& t, const Analysis& a);
void write_reconstruction(const std::filesystem::path& dir, const ReconstructionSet& rs);

struct RunResult {
  std::filesystem::path directory;
  Trajectory trajectory;
  Analysis analysis;
  /// Empty when the leading eigenvalues are complex (non-reversible data, eigen mode).
  std::optional<ReconstructionSet> reconstruction;
  Json manifest;
};

/// Full pipeline; writes every artifact plus manifest.json and config.txt. On failure the
/// manifest records the error and the exception is rethrown.
RunResult run(const RunConfig& cfg);

/// CSV files for plotting: spectrum, component functions on a 1000-point grid,
/// densities, coloured trajectory and long-format heat maps. Returns the files written.
std::vector<std::filesystem::path> emit_plot_data(const std::filesystem::path& run_dir);

/// 2 (config), 3 (data), 4 (numeric).
int exit_code(const Error& e);

}  // namespace grwalk
