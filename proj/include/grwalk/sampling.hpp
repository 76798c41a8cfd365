#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "grwalk/graphon.hpp"
#include "grwalk/io.hpp"

namespace grwalk {

struct Trajectory {
  std::vector<double> states;
  std::uint64_t seed = 0;
  std::string source;
  bool periodic = false;

  std::size_t steps() const { return states.empty() ? 0 : states.size() - 1; }
};

/// x^(k) paired with y^(k) = x^(k+1).
struct PairedData {
  std::vector<double> x;
  std::vector<double> y;

  std::size_t size() const { return x.size(); }
};

enum class SamplerMethod { inverse_transform, rejection };

struct WalkOptions {
  SamplerMethod method = SamplerMethod::inverse_transform;
  /// Grid on which p(x, .) is discretised for the inverse-transform sampler
  /// and for the rejection envelope.
  int grid = 1000;
  /// Leading states dropped before the trajectory is returned.
  int burn_in = 0;
  /// If set, x^(1) is this value instead of a uniform draw.
  std::optional<double> initial;
};

/// Random walk x^(k+1) ~ p(x^(k), .) with x^(1) ~ U[0,1]; returns m + 1 states.
Trajectory walk(const TransitionDensity& td, std::size_t m, std::uint64_t seed,
                const WalkOptions& options = {});

/// Overdamped Langevin dynamics dX = (-grad V + M grad V) dt + sqrt(2/beta) dW with the
/// k-well "lemon-slice" potential V = cos(k atan2(x2, x1)) + 10 (|x| - 1)^2.
struct SdeConfig {
  int wells = 5;
  /// Antisymmetric 2 x 2 drift matrix, row-major.
  std::array<double, 4> drift{0.0, 1.0, -1.0, 0.0};
  double beta = 2.0;
  double lag = 0.1;
  double dt = 0.005;
  /// Defaults to the well minimum at angle pi / k on the unit circle.
  std::optional<std::array<double, 2>> initial;
  int burn_in = 0;

  /// Throws ConfigError on a non-antisymmetric drift, non-positive parameters or
  /// a lag that is not an integer multiple of dt.
  int substeps() const;
  std::array<double, 2> initial_point() const;
};

/// Records every lag/dt-th Euler-Maruyama step as the angle mapped to [0,1) via
/// (omega + pi) / (2 pi). The trajectory is flagged periodic.
Trajectory sde_walk(const SdeConfig& cfg, std::size_t m, std::uint64_t seed);

/// Gradient of the lemon-slice potential at (x1, x2).
std::array<double, 2> lemon_slice_gradient(int wells, double x1, double x2);

/// Forward pairs; with symmetrize the reversed pairs are appended after them.
PairedData pairs(const Trajectory& t, bool symmetrize = false);

/// One value per line with header "x"; the sidecar <path>.json records seed, m,
/// source and the periodic flag.
void write_trajectory(const std::filesystem::path& path, const Trajectory& t,
                      const Json& extra_metadata = Json::object());
/// Reads the CSV (header optional) and, when present, the JSON sidecar.
Trajectory read_trajectory(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

}  // namespace grwalk
