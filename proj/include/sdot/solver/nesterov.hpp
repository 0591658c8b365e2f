#pragma once

#include <span>
#include <vector>

#include "sdot/core/measure.hpp"
#include "sdot/noise/marginal_model.hpp"
#include "sdot/parallel/kernels.hpp"

namespace sdot {

struct AgdOptions {
  std::size_t max_iter = 100000;
  double grad_tol = 1e-7;
};

struct AgdResult {
  std::vector<double> phi;  // mean-zero maximizer
  double objective = 0.0;
  double grad_norm = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

// Maximizes the finite-sample smooth dual nu.phi - sum_j w_j psi(phi, x_j) by
// accelerated gradient ascent with gradient-based restarts and step 1/L.
// Requires an exact gradient, i.e. the exponential or uniform model.
AgdResult nesterov_agd(std::span<const double> nu_weights, const CostMatrix& costs,
                       std::span<const double> sample_weights, const MarginalModel& model,
                       const AgdOptions& options = {});

}  // namespace sdot
