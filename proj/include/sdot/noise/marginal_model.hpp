#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdot {

enum class ModelKind { exponential, uniform, pareto, hyperbolic, tdist };

std::string to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);

// Argument outside the natural domain of F or F^{-1}.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A marginal quantile that is +-infinity; use the integral identity instead.
class InfiniteQuantile : public DomainError {
 public:
  using DomainError::DomainError;
};

// Marginal ambiguity set: generating function F with smoothing weight lambda,
// reference weights eta. Marginal CDFs are F_i(s) = clip(1 - eta_i F(-s), 0, 1)
// and the induced divergence generator is f(s) = int_0^s F^{-1}.
class MarginalModel {
 public:
  MarginalModel(ModelKind kind, double lambda, std::vector<double> eta, double q = 0.0);

  static MarginalModel exponential(double lambda, std::vector<double> eta);
  static MarginalModel uniform(double lambda, std::vector<double> eta);
  static MarginalModel pareto(double lambda, double q, std::vector<double> eta);
  static MarginalModel hyperbolic(double lambda, std::vector<double> eta);
  static MarginalModel tdist(double lambda, std::vector<double> eta);

  static std::vector<double> uniform_weights(std::size_t n);

  ModelKind kind() const { return kind_; }
  double lambda() const { return lambda_; }
  double q() const { return q_; }
  std::size_t size() const { return eta_.size(); }
  const std::vector<double>& eta() const { return eta_; }
  double eta(std::size_t i) const { return eta_[i]; }

  // F and F^{-1}; throw DomainError outside the natural domain.
  double cdf(double s) const;
  double quantile(double t) const;
  // F extended by 0 below and +inf above its support; never throws.
  double cdf_extended(double s) const;
  // F'(s), 0 outside the support.
  double cdf_derivative(double s) const;

  double marginal_cdf(std::size_t i, double s) const;
  // 1 - F_i(s) = clip(eta_i F(-s), 0, 1), without cancellation.
  double marginal_survival(std::size_t i, double s) const;
  double marginal_quantile(std::size_t i, double t) const;
  // F_i'(F_i^{-1}(1-p)) = eta_i F'(F^{-1}(p/eta_i)) for p in (0, 1).
  double marginal_density_at_prob(std::size_t i, double p) const;

  // f(s) for s >= 0 (returns +inf where f is infinite) and f'(s) = F^{-1}(s).
  double divergence(double s) const;
  double divergence_derivative(double s) const { return quantile(s); }

  // Global Lipschitz constant of every F_i, when one exists.
  std::optional<double> lipschitz() const;
  // Bracket resolution delta(eps) guaranteeing ||p - p*|| <= eps in bisection.
  double bisection_resolution(double eps) const;

  bool has_closed_form() const { return kind_ == ModelKind::exponential || kind_ == ModelKind::uniform; }

 private:
  ModelKind kind_;
  double lambda_;
  double q_;
  std::vector<double> eta_;
  double tshift_ = 0.0;  // lambda * sqrt(N-1) for the t-distribution
};

// Shift making sinh(s/lambda - k) a generating function with int_0^1 F^{-1} = 0.
double hyperbolic_shift();

double generating_cdf(const MarginalModel& m, double s);
double generating_quantile(const MarginalModel& m, double t);
double marginal_quantile(const MarginalModel& m, std::size_t i, double t);
double divergence_generator_value(const MarginalModel& m, double s);
// sum_i eta_i f(p_i / eta_i).
double discrete_f_divergence(const MarginalModel& m, std::span<const double> p);
// Worst-case gap between the smooth and the hard c-transform.
double approximation_bound(const MarginalModel& m);

}  // namespace sdot
