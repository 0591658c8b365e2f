#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sdot/core/cost.hpp"
#include "sdot/core/measure.hpp"
#include "sdot/noise/marginal_model.hpp"
#include "sdot/parallel/kernels.hpp"
#include "sdot/solver/averaged_sgd.hpp"
#include "sdot/solver/network_simplex.hpp"

namespace sdot {

// Minimum-norm point of {phi : phi_i - phi_k >= d_ik}, where d_ik is the
// largest c_ji - c_jk over samples j that send mass to atom i in the plan.
// This set is the optimal face of the finite-sample unregularized dual.
std::vector<double> min_norm_optimal_potential(const ExactOtResult& ot, const CostMatrix& costs,
                                               double mass_tol = 1e-14);

enum class ReferenceMethod { linear_program, accelerated_gradient, long_sgd };

std::string to_string(ReferenceMethod m);

struct ReferenceOptions {
  std::size_t sgd_iterations_factor = 50;  // long-SGD reference runs factor * T iterations
  std::size_t T = 0;                        // horizon of the run being compared
  double eps_bar = 0.1;                     // bisection budget for the long-SGD reference
  std::uint64_t shuffle_seed = 0;
  std::size_t max_arcs = 20000000;          // memory guard on samples x atoms
  double grad_tol = 1e-7;
};

struct ReferenceResult {
  double value = 0.0;        // empirical dual objective at phi
  std::vector<double> phi;   // mean-zero
  ReferenceMethod method = ReferenceMethod::linear_program;
  double residual = 0.0;     // gradient norm (AGD) or 0
  std::size_t iterations = 0;
};

// Reference optimum of the dual on the uniform empirical measure whose cost
// rows are given (typically 10 T samples).
ReferenceResult finite_sample_reference(const DiscreteMeasure& nu, const CostMatrix& costs,
                                        const std::optional<MarginalModel>& model, const ReferenceOptions& options);

}  // namespace sdot
