#include "sdot/solver/nesterov.hpp"

#include <cmath>
#include <stdexcept>

#include "sdot/solver/dual_objective.hpp"

namespace sdot {

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

ObjectiveAndGradient evaluate(std::span<const double> phi, std::span<const double> nu, const CostMatrix& costs,
                              std::span<const double> w, const MarginalModel& model) {
  auto r = dual_objective_and_gradient(phi, nu, costs, w, &model);
  if (!std::isfinite(r.value)) throw std::runtime_error("nesterov_agd: non-finite objective");
  return r;
}

}  // namespace

AgdResult nesterov_agd(std::span<const double> nu_weights, const CostMatrix& costs,
                       std::span<const double> sample_weights, const MarginalModel& model,
                       const AgdOptions& options) {
  if (!model.has_closed_form())
    throw std::invalid_argument("nesterov_agd: needs an exact gradient (exponential or uniform model)");
  const std::size_t n = nu_weights.size();
  if (costs.cols() != n) throw DimensionMismatch("nesterov_agd: cost matrix and measure differ in size");
  const double step = 1.0 / *model.lipschitz();

  std::vector<double> x(n, 0.0), x_prev(n, 0.0), y(n, 0.0);
  double theta = 1.0;
  AgdResult res;
  for (std::size_t k = 0; k < options.max_iter; ++k) {
    const auto gy = evaluate(y, nu_weights, costs, sample_weights, model);
    res.iterations = k + 1;
    if (norm2(gy.grad) <= options.grad_tol) {
      x = y;
      break;
    }
    x_prev = x;
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] + step * gy.grad[i];

    // Restart the momentum when it points against the ascent direction.
    double align = 0.0;
    for (std::size_t i = 0; i < n; ++i) align += gy.grad[i] * (x[i] - x_prev[i]);
    if (align < 0.0) {
      theta = 1.0;
      y = x;
      continue;
    }
    const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    const double beta = (theta - 1.0) / theta_next;
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + beta * (x[i] - x_prev[i]);
    theta = theta_next;
  }

  res.phi = mean_zero(x);
  const auto fx = evaluate(res.phi, nu_weights, costs, sample_weights, model);
  res.objective = fx.value;
  res.grad_norm = norm2(fx.grad);
  res.converged = res.grad_norm <= options.grad_tol;
  return res;
}

}  // namespace sdot
