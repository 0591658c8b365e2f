#include "sdot/core/cost.hpp"

#include <cmath>
#include <stdexcept>

#include "sdot/core/measure.hpp"

namespace sdot {

CostSpec CostSpec::pnorm(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("CostSpec: exponent p must be >= 1");
  return {CostKind::pnorm_power, p};
}

double eval_cost(std::span<const double> x, std::span<const double> y, const CostSpec& spec) {
  if (x.size() != y.size()) throw DimensionMismatch("eval_cost: points of different dimension");
  if (spec.kind == CostKind::sup_norm) {
    double m = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) m = std::max(m, std::abs(x[k] - y[k]));
    return m;
  }
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += (x[k] - y[k]) * (x[k] - y[k]);
  if (spec.p == 2.0) return s;
  if (spec.p == 1.0) return std::sqrt(s);
  return std::pow(s, 0.5 * spec.p);
}

}  // namespace sdot
