#include "sdot/solver/step_size.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sdot {

std::string to_string(RateRule r) {
  switch (r) {
    case RateRule::lipschitz: return "lipschitz";
    case RateRule::smooth: return "smooth";
    case RateRule::self_concordant: return "self_concordant";
  }
  return "?";
}

RateRule rate_rule_from_string(const std::string& s) {
  if (s == "lipschitz") return RateRule::lipschitz;
  if (s == "smooth") return RateRule::smooth;
  if (s == "self_concordant") return RateRule::self_concordant;
  throw std::invalid_argument("unknown rate rule '" + s + "'");
}

double RateConstants::G() const { return std::max(M.value_or(0.0), R + eps_bar); }

double step_size(RateRule rule, std::size_t T, double eps_bar, std::optional<double> L, std::optional<double> G,
                 bool theorem_variant) {
  if (T == 0) throw std::invalid_argument("step_size: T must be at least 1");
  if (!(eps_bar >= 0.0)) throw std::invalid_argument("step_size: eps_bar must be nonnegative");
  const double root_t = std::sqrt(static_cast<double>(T));
  switch (rule) {
    case RateRule::lipschitz:
      if (theorem_variant) return 1.0 / (2.0 * (2.0 + eps_bar) * (2.0 + eps_bar) * root_t);
      return 1.0 / (2.0 * (2.0 + eps_bar) * root_t);
    case RateRule::smooth:
      if (!L || !(*L > 0.0)) throw std::invalid_argument("step_size: smooth rule needs a positive L");
      return 1.0 / (2.0 * root_t + *L);
    case RateRule::self_concordant:
      if (!G || !(*G > 0.0)) throw std::invalid_argument("step_size: self-concordant rule needs a positive G");
      return 1.0 / (2.0 * *G * *G * root_t);
  }
  return 0.0;
}

}  // namespace sdot
