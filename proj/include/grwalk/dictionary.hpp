#pragma once

#include <span>
#include <vector>

#include "grwalk/io.hpp"
#include "grwalk/kernels.hpp"
#include "grwalk/types.hpp"

namespace grwalk {

enum class DictionaryKind { indicator, gaussian };

/// Basis functions phi_1..phi_n on [0,1].
///
/// indicator: equipartition [i/n, (i+1)/n), last interval closed (Ulam's method).
/// gaussian:  phi_i(x) = exp(-(x - c_i)^2 / (2 sigma^2)), c_i = (i + 1/2)/n; with the
///            periodic flag the distance is wrapped onto the unit circle.
class Dictionary {
 public:
  DictionaryKind kind() const { return kind_; }
  int size() const { return n_; }
  double bandwidth() const { return sigma_; }
  bool periodic() const { return periodic_; }
  double center(int i) const { return (i + 0.5) / n_; }

  /// phi(x) written to out[0..n). No domain check.
  void evaluate_into(double x, double* out) const;
  Vector evaluate(double x) const;
  /// n x m table, column k = phi(xs[k]). Throws DomainError for samples outside [0,1].
  Matrix evaluate(std::span<const double> xs, kernels::Backend backend = kernels::Backend::parallel) const;

  Json descriptor() const;
  static Dictionary from_descriptor(const Json& j);

  friend Dictionary make_indicator(int n);
  friend Dictionary make_gaussian(int n, double sigma, bool periodic);

 private:
  DictionaryKind kind_ = DictionaryKind::indicator;
  int n_ = 0;
  double sigma_ = 0.0;
  bool periodic_ = false;
};

Dictionary make_indicator(int n);
Dictionary make_gaussian(int n, double sigma, bool periodic = false);

/// Condition number of the Gram matrix int phi phi^T dx on a fine midpoint grid.
double gram_condition_number(const Dictionary& d, int grid = 4000);

}  // namespace grwalk
