#pragma once

#include <span>
#include <vector>

#include "sdot/noise/choice.hpp"

namespace sdot {

struct SmoothMax {
  double value = 0.0;
  ChoiceProbabilities probs;
};

// lambda log sum_i eta_i exp(u_i / lambda), max-shifted.
double log_partition(std::span<const double> u, std::span<const double> eta, double lambda);

// max over the simplex of sum v_i p_i - p_i^2 / eta_i.
double spmax(std::span<const double> v, std::span<const double> eta);

// max over the simplex of sum u_i p_i - sum eta_i f(p_i / eta_i), together with the maximizer.
SmoothMax smooth_max(std::span<const double> u, const MarginalModel& model, double eps);

double smooth_c_transform(std::span<const double> phi, std::span<const double> x, const DiscreteMeasure& nu,
                          const CostSpec& c, const MarginalModel& model, double eps);

// max over the simplex of sum u_i p_i + lambda sum sqrt(p_i (1 - p_i)), by
// spectral projected gradient ascent.
double chebyshev_value(std::span<const double> u, double lambda);

// Euclidean projection onto the probability simplex.
std::vector<double> project_to_simplex(std::span<const double> v);

}  // namespace sdot
