#pragma once

#include <span>

namespace sdot {

enum class CostKind { pnorm_power, sup_norm };

// c(x,y) = ||x-y||_2^p or ||x-y||_inf.
struct CostSpec {
  CostKind kind = CostKind::pnorm_power;
  double p = 2.0;

  static CostSpec pnorm(double p);
  static CostSpec sup_norm() { return {CostKind::sup_norm, 1.0}; }

  bool operator==(const CostSpec&) const = default;
};

double eval_cost(std::span<const double> x, std::span<const double> y, const CostSpec& spec);

}  // namespace sdot
