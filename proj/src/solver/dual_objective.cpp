#include "sdot/solver/dual_objective.hpp"

#include <cmath>

namespace sdot {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

ObjectiveEstimate dual_objective_estimate(std::span<const double> phi, std::span<const double> nu_weights,
                                          const CostMatrix& costs, std::span<const double> sample_weights,
                                          const MarginalModel* model, double eps, ExecPolicy policy) {
  if (costs.rows() == 0) throw std::invalid_argument("dual_objective_estimate: no samples");
  const auto terms = accumulate_dual_terms(phi, costs, sample_weights, model, eps, false, policy);
  const double mean_psi = terms.value_sum / terms.weight_sum;
  ObjectiveEstimate est;
  est.mean = dot(nu_weights, phi) - mean_psi;
  if (sample_weights.empty() && costs.rows() > 1) {
    const double m = static_cast<double>(costs.rows());
    const double var = std::max(0.0, (terms.value_sq_sum - m * mean_psi * mean_psi) / (m - 1.0));
    est.stderr_ = std::sqrt(var / m);
  }
  return est;
}

ObjectiveEstimate dual_objective_estimate(std::span<const double> phi, const DiscreteMeasure& nu, const CostSpec& c,
                                          const std::optional<MarginalModel>& model, const PointSet& samples,
                                          double eps, ExecPolicy policy) {
  const auto costs = CostMatrix::build(samples, nu, c, policy);
  return dual_objective_estimate(phi, nu.weights(), costs, {}, model ? &*model : nullptr, eps, policy);
}

ObjectiveAndGradient dual_objective_and_gradient(std::span<const double> phi, std::span<const double> nu_weights,
                                                 const CostMatrix& costs, std::span<const double> sample_weights,
                                                 const MarginalModel* model, double eps, ExecPolicy policy) {
  const auto terms = accumulate_dual_terms(phi, costs, sample_weights, model, eps, true, policy);
  ObjectiveAndGradient out;
  out.value = dot(nu_weights, phi) - terms.value_sum / terms.weight_sum;
  out.grad.resize(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) out.grad[i] = nu_weights[i] - terms.grad_sum[i] / terms.weight_sum;
  return out;
}

}  // namespace sdot
