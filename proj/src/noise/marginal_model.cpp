#include "sdot/noise/marginal_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sdot {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double clip01(double v) { return std::min(1.0, std::max(0.0, v)); }
}  // namespace

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::exponential: return "exponential";
    case ModelKind::uniform: return "uniform";
    case ModelKind::pareto: return "pareto";
    case ModelKind::hyperbolic: return "hyperbolic";
    case ModelKind::tdist: return "tdist";
  }
  return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "exponential") return ModelKind::exponential;
  if (s == "uniform") return ModelKind::uniform;
  if (s == "pareto") return ModelKind::pareto;
  if (s == "hyperbolic") return ModelKind::hyperbolic;
  if (s == "tdist") return ModelKind::tdist;
  throw std::invalid_argument("unknown model kind '" + s + "'");
}

double hyperbolic_shift() { return std::sqrt(2.0) - 1.0 - std::asinh(1.0); }

MarginalModel::MarginalModel(ModelKind kind, double lambda, std::vector<double> eta, double q)
    : kind_(kind), lambda_(lambda), q_(q), eta_(std::move(eta)) {
  if (!(lambda_ > 0.0) || !std::isfinite(lambda_)) throw std::invalid_argument("MarginalModel: lambda must be positive");
  if (eta_.empty()) throw std::invalid_argument("MarginalModel: eta is empty");
  for (double e : eta_)
    if (!(e > 0.0) || !std::isfinite(e)) throw std::invalid_argument("MarginalModel: eta entries must be positive");
  if (std::abs(std::accumulate(eta_.begin(), eta_.end(), 0.0) - 1.0) > 1e-12)
    throw std::invalid_argument("MarginalModel: eta must sum to 1");
  if (kind_ == ModelKind::pareto) {
    if (!(q_ > 0.0) || q_ == 1.0 || !std::isfinite(q_))
      throw std::invalid_argument("MarginalModel: pareto q must be positive and different from 1");
  }
  if (kind_ == ModelKind::tdist) {
    // F is bounded by N, so 1 - eta_i F(-s) is a distribution function only if every eta_i >= 1/N.
    const double u = 1.0 / static_cast<double>(eta_.size());
    for (double e : eta_)
      if (std::abs(e - u) > 1e-12) throw std::invalid_argument("MarginalModel: the t-distribution model needs uniform eta");
    tshift_ = lambda_ * std::sqrt(static_cast<double>(eta_.size()) - 1.0);
  }
}

MarginalModel MarginalModel::exponential(double lambda, std::vector<double> eta) {
  return {ModelKind::exponential, lambda, std::move(eta)};
}
MarginalModel MarginalModel::uniform(double lambda, std::vector<double> eta) {
  return {ModelKind::uniform, lambda, std::move(eta)};
}
MarginalModel MarginalModel::pareto(double lambda, double q, std::vector<double> eta) {
  return {ModelKind::pareto, lambda, std::move(eta), q};
}
MarginalModel MarginalModel::hyperbolic(double lambda, std::vector<double> eta) {
  return {ModelKind::hyperbolic, lambda, std::move(eta)};
}
MarginalModel MarginalModel::tdist(double lambda, std::vector<double> eta) {
  return {ModelKind::tdist, lambda, std::move(eta)};
}

std::vector<double> MarginalModel::uniform_weights(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_weights: n must be positive");
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

double MarginalModel::cdf(double s) const {
  if (kind_ == ModelKind::pareto) {
    const double base = s * (q_ - 1.0) / (lambda_ * q_) + 1.0 / q_;
    if (base < 0.0 || (q_ < 1.0 && base == 0.0))
      throw DomainError("pareto generating function: negative base at s = " + std::to_string(s));
  }
  if (std::isnan(s)) throw DomainError("generating function: NaN argument");
  return cdf_extended(s);
}

double MarginalModel::cdf_extended(double s) const {
  switch (kind_) {
    case ModelKind::exponential:
      return std::exp(s / lambda_ - 1.0);
    case ModelKind::uniform:
      return s / (2.0 * lambda_) + 0.5;
    case ModelKind::pareto: {
      const double base = s * (q_ - 1.0) / (lambda_ * q_) + 1.0 / q_;
      if (base <= 0.0) return q_ > 1.0 ? 0.0 : kInf;
      return std::pow(base, 1.0 / (q_ - 1.0));
    }
    case ModelKind::hyperbolic:
      return std::sinh(s / lambda_ - hyperbolic_shift());
    case ModelKind::tdist: {
      const double n = static_cast<double>(eta_.size());
      const double v = s - tshift_;
      if (std::isinf(v)) return v > 0 ? n : 0.0;
      return 0.5 * n * (1.0 + v / std::hypot(lambda_, v));
    }
  }
  return 0.0;
}

double MarginalModel::cdf_derivative(double s) const {
  switch (kind_) {
    case ModelKind::exponential:
      return std::exp(s / lambda_ - 1.0) / lambda_;
    case ModelKind::uniform:
      return 0.5 / lambda_;
    case ModelKind::pareto: {
      const double base = s * (q_ - 1.0) / (lambda_ * q_) + 1.0 / q_;
      if (base <= 0.0) return q_ > 1.0 ? 0.0 : kInf;
      return std::pow(base, (2.0 - q_) / (q_ - 1.0)) / (lambda_ * q_);
    }
    case ModelKind::hyperbolic:
      return std::cosh(s / lambda_ - hyperbolic_shift()) / lambda_;
    case ModelKind::tdist: {
      const double n = static_cast<double>(eta_.size());
      const double v = s - tshift_;
      const double r = std::hypot(lambda_, v);
      return 0.5 * n * lambda_ * lambda_ / (r * r * r);
    }
  }
  return 0.0;
}

double MarginalModel::quantile(double t) const {
  if (std::isnan(t)) throw DomainError("generating quantile: NaN argument");
  switch (kind_) {
    case ModelKind::exponential:
      if (t < 0.0) throw DomainError("exponential quantile: negative argument");
      if (t == 0.0) return -kInf;
      return lambda_ * (std::log(t) + 1.0);
    case ModelKind::uniform:
      return lambda_ * (2.0 * t - 1.0);
    case ModelKind::pareto:
      if (t < 0.0) throw DomainError("pareto quantile: negative argument");
      if (t == 0.0) return q_ > 1.0 ? -lambda_ / (q_ - 1.0) : -kInf;
      return lambda_ * (q_ * std::pow(t, q_ - 1.0) - 1.0) / (q_ - 1.0);
    case ModelKind::hyperbolic:
      return lambda_ * (std::asinh(t) + hyperbolic_shift());
    case ModelKind::tdist: {
      const double n = static_cast<double>(eta_.size());
      if (t < 0.0 || t > n) throw DomainError("t-distribution quantile: argument outside [0, N]");
      if (t == 0.0) return -kInf;
      if (t == n) return kInf;
      return tshift_ + lambda_ * (2.0 * t - n) / (2.0 * std::sqrt(t * (n - t)));
    }
  }
  return 0.0;
}

double MarginalModel::marginal_survival(std::size_t i, double s) const {
  const double v = cdf_extended(-s);
  if (v <= 0.0) return 0.0;
  return clip01(eta_.at(i) * v);
}

double MarginalModel::marginal_cdf(std::size_t i, double s) const {
  return clip01(1.0 - eta_.at(i) * cdf_extended(-s));
}

double MarginalModel::marginal_quantile(std::size_t i, double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("marginal quantile: t outside [0, 1]");
  const double arg = (1.0 - t) / eta_.at(i);
  double v;
  try {
    v = -quantile(arg);
  } catch (const DomainError&) {
    throw InfiniteQuantile("marginal quantile: level " + std::to_string(t) + " lies outside the range of F_" +
                           std::to_string(i));
  }
  if (!std::isfinite(v)) throw InfiniteQuantile("marginal quantile: infinite at level " + std::to_string(t));
  return v;
}

double MarginalModel::marginal_density_at_prob(std::size_t i, double p) const {
  return eta_.at(i) * cdf_derivative(quantile(p / eta_.at(i)));
}

double MarginalModel::divergence(double s) const {
  if (!(s >= 0.0)) throw DomainError("divergence generator: negative argument");
  switch (kind_) {
    case ModelKind::exponential:
      return s == 0.0 ? 0.0 : lambda_ * s * std::log(s);
    case ModelKind::uniform:
      return lambda_ * (s * s - s);
    case ModelKind::pareto:
      return lambda_ * (std::pow(s, q_) - s) / (q_ - 1.0);
    case ModelKind::hyperbolic:
      return lambda_ * (s * std::asinh(s) - std::hypot(s, 1.0) + 1.0 + hyperbolic_shift() * s);
    case ModelKind::tdist: {
      const double n = static_cast<double>(eta_.size());
      if (s > n * (1.0 + 1e-12)) return kInf;
      s = std::min(s, n);
      return -lambda_ * std::sqrt(s * (n - s)) + lambda_ * s * std::sqrt(n - 1.0);
    }
  }
  return 0.0;
}

std::optional<double> MarginalModel::lipschitz() const {
  const double emax = *std::max_element(eta_.begin(), eta_.end());
  switch (kind_) {
    case ModelKind::exponential:
      return 1.0 / lambda_;
    case ModelKind::uniform:
      return emax / (2.0 * lambda_);
    case ModelKind::pareto:
      if (q_ > 2.0) return std::nullopt;
      // eta^{q-1} is increasing in eta for q > 1 and decreasing for q < 1.
      if (q_ > 1.0) return std::pow(emax, q_ - 1.0) / (lambda_ * q_);
      return std::pow(*std::min_element(eta_.begin(), eta_.end()), q_ - 1.0) / (lambda_ * q_);
    case ModelKind::hyperbolic:
      return std::sqrt(1.0 + emax * emax) / lambda_;
    case ModelKind::tdist:
      return emax * static_cast<double>(eta_.size()) / (2.0 * lambda_);
  }
  return std::nullopt;
}

double MarginalModel::bisection_resolution(double eps) const {
  if (!(eps > 0.0)) throw std::invalid_argument("bisection_resolution: eps must be positive");
  const double root_n = std::sqrt(static_cast<double>(eta_.size()));
  if (auto lip = lipschitz()) return eps / (*lip * root_n);
  // Pareto with q > 2: F_i is Holder with exponent 1/(q-1).
  const double emax = *std::max_element(eta_.begin(), eta_.end());
  return lambda_ * q_ / (q_ - 1.0) * std::pow(eps / (emax * root_n), q_ - 1.0);
}

double generating_cdf(const MarginalModel& m, double s) { return m.cdf(s); }
double generating_quantile(const MarginalModel& m, double t) { return m.quantile(t); }
double marginal_quantile(const MarginalModel& m, std::size_t i, double t) { return m.marginal_quantile(i, t); }
double divergence_generator_value(const MarginalModel& m, double s) { return m.divergence(s); }

double discrete_f_divergence(const MarginalModel& m, std::span<const double> p) {
  if (p.size() != m.size()) throw std::invalid_argument("discrete_f_divergence: length mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) d += m.eta(i) * m.divergence(std::max(0.0, p[i]) / m.eta(i));
  return d;
}

double approximation_bound(const MarginalModel& m) {
  const double f0 = m.divergence(0.0);
  double best = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double e = m.eta(i);
    best = std::max(best, std::abs(m.divergence(1.0 / e) * e + f0 * (1.0 - e)));
  }
  return best;
}

}  // namespace sdot
