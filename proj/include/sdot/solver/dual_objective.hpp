#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sdot/core/cost.hpp"
#include "sdot/core/measure.hpp"
#include "sdot/noise/marginal_model.hpp"
#include "sdot/parallel/kernels.hpp"

namespace sdot {

struct ObjectiveEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;  // standard error of the mean (unit weights only)
};

// Tolerance used for bisection oracles when evaluating objectives.
inline constexpr double kEvalEps = 1e-10;

// Monte Carlo estimate of E[nu.phi - psi(phi, x)] (smooth transform when a model is given).
ObjectiveEstimate dual_objective_estimate(std::span<const double> phi, const DiscreteMeasure& nu, const CostSpec& c,
                                          const std::optional<MarginalModel>& model, const PointSet& samples,
                                          double eps = kEvalEps, ExecPolicy policy = ExecPolicy::parallel);

// Same on a precomputed cost matrix, with optional sample weights (empty = uniform).
ObjectiveEstimate dual_objective_estimate(std::span<const double> phi, std::span<const double> nu_weights,
                                          const CostMatrix& costs, std::span<const double> sample_weights,
                                          const MarginalModel* model, double eps = kEvalEps,
                                          ExecPolicy policy = ExecPolicy::parallel);

struct ObjectiveAndGradient {
  double value = 0.0;
  std::vector<double> grad;  // nu - E[p]
};

ObjectiveAndGradient dual_objective_and_gradient(std::span<const double> phi, std::span<const double> nu_weights,
                                                 const CostMatrix& costs, std::span<const double> sample_weights,
                                                 const MarginalModel* model, double eps = kEvalEps,
                                                 ExecPolicy policy = ExecPolicy::parallel);

}  // namespace sdot
