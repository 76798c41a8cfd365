#include "grwalk/density.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "grwalk/diagnostics.hpp"
#include "grwalk/error.hpp"

namespace grwalk {

KernelDensity::KernelDensity(std::vector<double> samples, double bandwidth, bool periodic)
    : samples_(std::move(samples)), bandwidth_(bandwidth), periodic_(periodic) {
  if (samples_.empty()) throw ConfigError("kernel density needs samples");
  if (!(bandwidth_ > 0.0)) throw ConfigError("kernel density bandwidth must be positive");
  std::sort(samples_.begin(), samples_.end());
}

double KernelDensity::operator()(double x) const {
  const double pt[1] = {x};
  return kernels::kde_evaluate(samples_, bandwidth_, pt,
                               periodic_ ? kernels::Boundary::periodic : kernels::Boundary::reflect,
                               kernels::Backend::serial)[0];
}

Vector KernelDensity::evaluate(std::span<const double> xs, kernels::Backend backend) const {
  return kernels::kde_evaluate(samples_, bandwidth_, xs,
                               periodic_ ? kernels::Boundary::periodic : kernels::Boundary::reflect, backend);
}

KernelDensity kde_density(std::span<const double> samples, std::optional<double> bandwidth, bool periodic) {
  if (samples.size() < 10) throw ConfigError("kde_density needs at least 10 samples");
  double h = 0.0;
  if (bandwidth) {
    h = *bandwidth;
  } else {
    const double m = static_cast<double>(samples.size());
    const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / m;
    double ss = 0.0;
    for (double s : samples) ss += (s - mean) * (s - mean);
    const double sd = std::sqrt(ss / (m - 1.0));
    h = 1.06 * sd * std::pow(m, -0.2);
    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
    if (*lo == *hi || !(sd > 0.0)) {
      warn("kde_density: samples have zero spread; using minimum bandwidth 1e-3");
      h = kMinimumBandwidth;
    }
  }
  return KernelDensity(std::vector<double>(samples.begin(), samples.end()), h, periodic);
}

ScalarFunction interpolate_grid(const Vector& nodes, const Vector& values) {
  auto xs = std::make_shared<const std::vector<double>>(nodes.data(), nodes.data() + nodes.size());
  auto ys = std::make_shared<const std::vector<double>>(values.data(), values.data() + values.size());
  return [xs, ys](double x) {
    const auto& a = *xs;
    const auto& b = *ys;
    if (x <= a.front()) return b.front();
    if (x >= a.back()) return b.back();
    const auto it = std::upper_bound(a.begin(), a.end(), x);
    const auto i = static_cast<std::size_t>(it - a.begin());
    const double t = (x - a[i - 1]) / (a[i] - a[i - 1]);
    return b[i - 1] + t * (b[i] - b[i - 1]);
  };
}

}  // namespace grwalk
