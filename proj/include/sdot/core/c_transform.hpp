#pragma once

#include <span>
#include <vector>

#include "sdot/core/cost.hpp"
#include "sdot/core/measure.hpp"

namespace sdot {

struct CTransform {
  double value = 0.0;
  std::size_t winner = 0;  // zero-based, smallest maximizing index
};

// u_i = phi_i - c(x, y_i).
void utilities(std::span<const double> phi, std::span<const double> x, const DiscreteMeasure& nu,
               const CostSpec& c, std::span<double> out);
std::vector<double> utilities(std::span<const double> phi, std::span<const double> x,
                              const DiscreteMeasure& nu, const CostSpec& c);

CTransform max_with_index(std::span<const double> u);

CTransform discrete_c_transform(std::span<const double> phi, std::span<const double> x,
                                const DiscreteMeasure& nu, const CostSpec& c);

std::vector<double> subgradient_indicator(std::span<const double> phi, std::span<const double> x,
                                          const DiscreteMeasure& nu, const CostSpec& c);

}  // namespace sdot
