#include "grwalk/dictionary.hpp"

#include <algorithm>
#include <cmath>

#include "grwalk/error.hpp"

namespace grwalk {

Dictionary make_indicator(int n) {
  if (n < 2) throw ConfigError("indicator dictionary needs n >= 2");
  Dictionary d;
  d.kind_ = DictionaryKind::indicator;
  d.n_ = n;
  return d;
}

Dictionary make_gaussian(int n, double sigma, bool periodic) {
  if (n < 2) throw ConfigError("gaussian dictionary needs n >= 2");
  if (!(sigma > 0.0)) throw ConfigError("gaussian dictionary needs sigma > 0");
  Dictionary d;
  d.kind_ = DictionaryKind::gaussian;
  d.n_ = n;
  d.sigma_ = sigma;
  d.periodic_ = periodic;
  return d;
}

void Dictionary::evaluate_into(double x, double* out) const {
  if (kind_ == DictionaryKind::indicator) {
    std::fill(out, out + n_, 0.0);
    const int i = std::clamp(static_cast<int>(std::floor(x * n_)), 0, n_ - 1);
    out[i] = 1.0;
    return;
  }
  const double inv = 1.0 / (2.0 * sigma_ * sigma_);
  for (int i = 0; i < n_; ++i) {
    double d = std::abs(x - center(i));
    if (periodic_) d = std::min({d, std::abs(x - center(i) + 1.0), std::abs(x - center(i) - 1.0)});
    out[i] = std::exp(-d * d * inv);
  }
}

Vector Dictionary::evaluate(double x) const {
  Vector v(n_);
  evaluate_into(x, v.data());
  return v;
}

Matrix Dictionary::evaluate(std::span<const double> xs, kernels::Backend backend) const {
  for (std::size_t k = 0; k < xs.size(); ++k)
    if (!(xs[k] >= 0.0 && xs[k] <= 1.0))
      throw DomainError("dictionary: sample " + std::to_string(k) + " = " + std::to_string(xs[k]) +
                        " outside [0,1]");
  return kernels::evaluate_columns([this](double x, double* out) { evaluate_into(x, out); }, n_, xs,
                                   backend);
}

Json Dictionary::descriptor() const {
  Json j = {{"kind", kind_ == DictionaryKind::indicator ? "indicator" : "gaussian"}, {"n", n_}};
  if (kind_ == DictionaryKind::gaussian) {
    j["sigma"] = sigma_;
    j["periodic"] = periodic_;
  }
  return j;
}

Dictionary Dictionary::from_descriptor(const Json& j) {
  const auto kind = j.at("kind").get<std::string>();
  const int n = j.at("n").get<int>();
  if (kind == "indicator") return make_indicator(n);
  if (kind == "gaussian") return make_gaussian(n, j.at("sigma").get<double>(), j.value("periodic", false));
  throw ConfigError("unknown dictionary kind '" + kind + "'");
}

double gram_condition_number(const Dictionary& d, int grid) {
  const Vector nodes = MidpointGrid{grid}.nodes();
  const Matrix phi = d.evaluate(std::span<const double>(nodes.data(), static_cast<std::size_t>(nodes.size())));
  const Matrix gram = phi * phi.transpose() / grid;
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  const Vector ev = es.eigenvalues();
  if (ev.minCoeff() <= 0.0) return std::numeric_limits<double>::infinity();
  return ev.maxCoeff() / ev.minCoeff();
}

}  // namespace grwalk
