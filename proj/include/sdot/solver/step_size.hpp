#pragma once

#include <cstddef>
#include <optional>
#include <string>

namespace sdot {

enum class RateRule { lipschitz, smooth, self_concordant };

std::string to_string(RateRule r);
RateRule rate_rule_from_string(const std::string& s);

struct RateConstants {
  double R = 2.0;         // gradient bound
  std::optional<double> L;  // smoothness
  std::optional<double> M;  // generalized self-concordance
  double eps_bar = 0.0;
  std::optional<double> kappa;  // diagnostic only

  double G() const;  // max{M, R + eps_bar}
};

// Constant step sizes:
//   lipschitz        1 / (2 (2 + eps_bar) sqrt T)   (theorem variant: 1 / (2 (R + eps_bar)^2 sqrt T), R = 2)
//   smooth           1 / (2 sqrt T + L)
//   self_concordant  1 / (2 G^2 sqrt T)
double step_size(RateRule rule, std::size_t T, double eps_bar, std::optional<double> L = std::nullopt,
                 std::optional<double> G = std::nullopt, bool theorem_variant = false);

}  // namespace sdot
