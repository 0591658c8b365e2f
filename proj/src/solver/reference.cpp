#include "sdot/solver/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "sdot/solver/dual_objective.hpp"
#include "sdot/solver/nesterov.hpp"

namespace sdot {

std::string to_string(ReferenceMethod m) {
  switch (m) {
    case ReferenceMethod::linear_program: return "linear_program";
    case ReferenceMethod::accelerated_gradient: return "accelerated_gradient";
    case ReferenceMethod::long_sgd: return "long_sgd";
  }
  return "?";
}

std::vector<double> min_norm_optimal_potential(const ExactOtResult& ot, const CostMatrix& costs, double mass_tol) {
  const std::size_t n = costs.cols();
  constexpr double kNone = -std::numeric_limits<double>::infinity();
  std::vector<double> bound(n * n, kNone);  // bound[i*n+k] = d_ik
  for (const auto& e : ot.plan) {
    if (e.mass <= mass_tol) continue;
    const auto row = costs.row(e.source);
    const std::size_t i = e.target;
    for (std::size_t k = 0; k < n; ++k)
      if (k != i) bound[i * n + k] = std::max(bound[i * n + k], row[i] - row[k]);
  }
  struct Constraint {
    std::size_t i, k;
    double d;
  };
  std::vector<Constraint> cons;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      if (bound[i * n + k] != kNone) cons.push_back({i, k, bound[i * n + k]});

  // Hildreth's dual coordinate ascent for min ||phi||^2 s.t. phi_i - phi_k >= d_ik.
  std::vector<double> phi(n, 0.0), mult(cons.size(), 0.0);
  for (std::size_t sweep = 0; sweep < 1000000; ++sweep) {
    double change = 0.0;
    for (std::size_t r = 0; r < cons.size(); ++r) {
      const auto& c = cons[r];
      const double viol = c.d - (phi[c.i] - phi[c.k]);
      const double next = std::max(0.0, mult[r] + 0.5 * viol);
      const double step = next - mult[r];
      if (step != 0.0) {
        mult[r] = next;
        phi[c.i] += step;
        phi[c.k] -= step;
        change = std::max(change, std::abs(step));
      }
    }
    if (change < 1e-15) break;
  }
  return mean_zero(phi);
}

ReferenceResult finite_sample_reference(const DiscreteMeasure& nu, const CostMatrix& costs,
                                        const std::optional<MarginalModel>& model, const ReferenceOptions& options) {
  const std::size_t m = costs.rows();
  if (m == 0) throw std::invalid_argument("finite_sample_reference: no samples");
  if (costs.cols() != nu.size()) throw DimensionMismatch("finite_sample_reference: cost matrix and measure differ");
  if (m * nu.size() > options.max_arcs)
    throw std::length_error("finite_sample_reference: samples x atoms exceeds the memory guard");

  ReferenceResult res;
  if (!model) {
    const std::vector<double> mu(m, 1.0 / static_cast<double>(m));
    const auto ot = exact_discrete_ot(mu, nu.weights(), costs, options.max_arcs);
    res.method = ReferenceMethod::linear_program;
    res.value = ot.value;
    res.phi = min_norm_optimal_potential(ot, costs);
    res.iterations = ot.pivots;
    return res;
  }

  if (model->has_closed_form()) {
    AgdOptions opt;
    opt.grad_tol = options.grad_tol;
    const auto agd = nesterov_agd(nu.weights(), costs, {}, *model, opt);
    res.method = ReferenceMethod::accelerated_gradient;
    res.value = agd.objective;
    res.phi = agd.phi;
    res.residual = agd.grad_norm;
    res.iterations = agd.iterations;
    return res;
  }

  // Long averaged SGD over shuffled passes of the sample set.
  if (options.T == 0) throw std::invalid_argument("finite_sample_reference: long-SGD reference needs T");
  SolverConfig cfg;
  cfg.T = options.sgd_iterations_factor * options.T;
  cfg.eps_bar = options.eps_bar;
  cfg.schedule = LogSchedule::none;
  if (auto lip = model->lipschitz()) {
    cfg.rule = RateRule::smooth;
    cfg.constants.L = *lip;
  } else {
    cfg.rule = RateRule::lipschitz;
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(options.shuffle_seed);
  std::size_t pass = static_cast<std::size_t>(-1);
  CostRowSource rows = [&](std::size_t t, std::span<double> out) {
    const std::size_t k = (t - 1) % m;
    if ((t - 1) / m != pass) {
      pass = (t - 1) / m;
      std::shuffle(order.begin(), order.end(), rng);
    }
    const auto r = costs.row(order[k]);
    std::copy(r.begin(), r.end(), out.begin());
  };
  const auto sgd = averaged_sgd(rows, nu.weights(), &*model, cfg);
  res.method = ReferenceMethod::long_sgd;
  res.phi = mean_zero(sgd.upper);
  res.value = dual_objective_estimate(res.phi, nu.weights(), costs, {}, &*model).mean;
  res.iterations = cfg.T;
  return res;
}

}  // namespace sdot
