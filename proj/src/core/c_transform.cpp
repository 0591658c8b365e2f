#include "sdot/core/c_transform.hpp"

#include <stdexcept>

namespace sdot {

void utilities(std::span<const double> phi, std::span<const double> x, const DiscreteMeasure& nu,
               const CostSpec& c, std::span<double> out) {
  if (phi.size() != nu.size() || out.size() != nu.size())
    throw DimensionMismatch("utilities: potential length does not match the number of atoms");
  if (x.size() != nu.dim()) throw DimensionMismatch("utilities: point dimension does not match atoms");
  for (std::size_t i = 0; i < phi.size(); ++i) out[i] = phi[i] - eval_cost(x, nu.atom(i), c);
}

std::vector<double> utilities(std::span<const double> phi, std::span<const double> x,
                              const DiscreteMeasure& nu, const CostSpec& c) {
  std::vector<double> u(nu.size());
  utilities(phi, x, nu, c, u);
  return u;
}

CTransform max_with_index(std::span<const double> u) {
  if (u.empty()) throw std::invalid_argument("max_with_index: empty vector");
  CTransform r{u[0], 0};
  for (std::size_t i = 1; i < u.size(); ++i)
    if (u[i] > r.value) r = {u[i], i};
  return r;
}

CTransform discrete_c_transform(std::span<const double> phi, std::span<const double> x,
                                const DiscreteMeasure& nu, const CostSpec& c) {
  return max_with_index(utilities(phi, x, nu, c));
}

std::vector<double> subgradient_indicator(std::span<const double> phi, std::span<const double> x,
                                          const DiscreteMeasure& nu, const CostSpec& c) {
  std::vector<double> p(nu.size(), 0.0);
  p[discrete_c_transform(phi, x, nu, c).winner] = 1.0;
  return p;
}

}  // namespace sdot
