#pragma once

#include <optional>
#include <span>
#include <vector>

#include "grwalk/kernels.hpp"
#include "grwalk/types.hpp"

namespace grwalk {

/// Gaussian-kernel density estimate on [0,1], with mirror images at 0 and 1
/// (or wrapped images for periodic data).
class KernelDensity {
 public:
  KernelDensity(std::vector<double> samples, double bandwidth, bool periodic);

  double operator()(double x) const;
  Vector evaluate(std::span<const double> xs, kernels::Backend backend = kernels::Backend::parallel) const;

  double bandwidth() const { return bandwidth_; }
  bool periodic() const { return periodic_; }
  std::size_t sample_count() const { return samples_.size(); }

 private:
  std::vector<double> samples_;  // sorted
  double bandwidth_;
  bool periodic_;
};

inline constexpr double kMinimumBandwidth = 1e-3;

/// Silverman's rule h = 1.06 s m^(-1/5) unless a fixed bandwidth is given. A zero
/// sample spread falls back to h = 1e-3 with a warning. Needs >= 10 samples.
KernelDensity kde_density(std::span<const double> samples, std::optional<double> bandwidth = std::nullopt,
                          bool periodic = false);

/// Samples f at the midpoints of a grid and interpolates linearly between them
/// (constant beyond the outermost nodes). Used for densities restored from JSON.
ScalarFunction interpolate_grid(const Vector& nodes, const Vector& values);

}  // namespace grwalk
