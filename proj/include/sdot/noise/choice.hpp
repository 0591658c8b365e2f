#pragma once

#include <span>
#include <string>
#include <vector>

#include "sdot/core/cost.hpp"
#include "sdot/core/measure.hpp"
#include "sdot/noise/marginal_model.hpp"

namespace sdot {

enum class ChoiceMethod { closed_form, sort, bisection };

std::string to_string(ChoiceMethod m);

struct ChoiceProbabilities {
  std::vector<double> p;
  ChoiceMethod method = ChoiceMethod::closed_form;
  double eps = 0.0;         // achieved tolerance, 0 for exact oracles
  double tau = 0.0;         // root (bisection: lower bracket end; sort: threshold)
  std::size_t iterations = 0;
};

// p_i proportional to eta_i exp(u_i / lambda).
ChoiceProbabilities softmax_probs(std::span<const double> u, std::span<const double> eta, double lambda);

// argmax over the simplex of sum u_i p_i - p_i^2 / eta_i.
ChoiceProbabilities sparsemax_probs(std::span<const double> u, std::span<const double> eta);

// Bisection on tau for sum_i clip(eta_i F(u_i + tau)) = 1, accurate to eps in
// Euclidean norm. The output uses the lower bracket end, so sum p <= 1.
ChoiceProbabilities bisection_probs(std::span<const double> u, const MarginalModel& model, double eps);

// Dispatch on the model: softmax, sparsemax (on u / lambda) or bisection.
ChoiceProbabilities choice_probabilities_from_utilities(std::span<const double> u, const MarginalModel& model,
                                                        double eps);

ChoiceProbabilities choice_probabilities(std::span<const double> phi, std::span<const double> x,
                                         const DiscreteMeasure& nu, const CostSpec& c, const MarginalModel& model,
                                         double eps);

// Sum of eta_i clip(F(u_i + tau)) terms, i.e. the root map of the bisection.
double root_map(std::span<const double> u, const MarginalModel& model, double tau);

// Jacobian dp/du at an interior solution: D - d d^T / sum(d) with
// d_i = F_i'(F_i^{-1}(1 - p_i)) on the support of p. Row-major N x N.
std::vector<double> choice_jacobian(std::span<const double> p, const MarginalModel& model);

}  // namespace sdot
