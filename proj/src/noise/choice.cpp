#include "sdot/noise/choice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sdot/core/c_transform.hpp"

namespace sdot {

std::string to_string(ChoiceMethod m) {
  switch (m) {
    case ChoiceMethod::closed_form: return "closed-form";
    case ChoiceMethod::sort: return "sort";
    case ChoiceMethod::bisection: return "bisection";
  }
  return "?";
}

ChoiceProbabilities softmax_probs(std::span<const double> u, std::span<const double> eta, double lambda) {
  if (u.size() != eta.size() || u.empty()) throw std::invalid_argument("softmax_probs: length mismatch");
  if (!(lambda > 0.0)) throw std::invalid_argument("softmax_probs: lambda must be positive");
  const double m = *std::max_element(u.begin(), u.end());
  ChoiceProbabilities r;
  r.p.resize(u.size());
  double z = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    r.p[i] = eta[i] * std::exp((u[i] - m) / lambda);
    z += r.p[i];
  }
  for (double& v : r.p) v /= z;
  r.method = ChoiceMethod::closed_form;
  return r;
}

ChoiceProbabilities sparsemax_probs(std::span<const double> u, std::span<const double> eta) {
  const std::size_t n = u.size();
  if (eta.size() != n || n == 0) throw std::invalid_argument("sparsemax_probs: length mismatch");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return u[a] > u[b]; });

  // Largest k with 2 + S_eta(k) u_(k) > S_{eta u}(k).
  double s_eta = 0.0, s_eta_u = 0.0;
  double best_eta = 0.0, best_eta_u = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t i = order[j];
    s_eta += eta[i];
    s_eta_u += eta[i] * u[i];
    if (2.0 + s_eta * u[i] > s_eta_u) {
      best_eta = s_eta;
      best_eta_u = s_eta_u;
    }
  }
  const double tau = (best_eta_u - 2.0) / best_eta;

  ChoiceProbabilities r;
  r.p.resize(n);
  for (std::size_t i = 0; i < n; ++i) r.p[i] = eta[i] * std::max(0.0, u[i] - tau) / 2.0;
  r.method = ChoiceMethod::sort;
  r.tau = tau;
  return r;
}

double root_map(std::span<const double> u, const MarginalModel& model, double tau) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += model.marginal_survival(i, -u[i] - tau);
  return s;
}

ChoiceProbabilities bisection_probs(std::span<const double> u, const MarginalModel& model, double eps) {
  const std::size_t n = u.size();
  if (n != model.size()) throw std::invalid_argument("bisection_probs: utilities and model differ in length");
  if (!(eps > 0.0)) throw std::invalid_argument("bisection_probs: eps must be positive");

  // tau_i = -u_i - F_i^{-1}(1 - 1/N) = -u_i + F^{-1}(1/(N eta_i)).
  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double q;
    try {
      q = model.quantile(1.0 / (static_cast<double>(n) * model.eta(i)));
    } catch (const DomainError&) {
      q = std::numeric_limits<double>::infinity();
    }
    const double t = -u[i] + q;
    if (!std::isfinite(t)) throw DomainError("bisection_probs: non-finite bracket for atom " + std::to_string(i));
    hi = std::max(hi, t);
    lo = std::min(lo, t);
  }

  const double delta = model.bisection_resolution(eps);
  std::size_t iters = 0;
  if (hi - lo > delta) iters = static_cast<std::size_t>(std::ceil(std::log2((hi - lo) / delta)));
  std::size_t done = 0;
  for (; done < iters; ++done) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket at floating-point resolution
    if (root_map(u, model, mid) > 1.0)
      hi = mid;
    else
      lo = mid;
  }

  ChoiceProbabilities r;
  r.p.resize(n);
  for (std::size_t i = 0; i < n; ++i) r.p[i] = model.marginal_survival(i, -u[i] - lo);
  r.method = ChoiceMethod::bisection;
  r.eps = eps;
  r.tau = lo;
  r.iterations = done;
  return r;
}

ChoiceProbabilities choice_probabilities_from_utilities(std::span<const double> u, const MarginalModel& model,
                                                        double eps) {
  switch (model.kind()) {
    case ModelKind::exponential:
      return softmax_probs(u, model.eta(), model.lambda());
    case ModelKind::uniform: {
      std::vector<double> v(u.begin(), u.end());
      for (double& x : v) x /= model.lambda();
      return sparsemax_probs(v, model.eta());
    }
    default:
      return bisection_probs(u, model, eps);
  }
}

ChoiceProbabilities choice_probabilities(std::span<const double> phi, std::span<const double> x,
                                         const DiscreteMeasure& nu, const CostSpec& c, const MarginalModel& model,
                                         double eps) {
  if (model.size() != nu.size()) throw DimensionMismatch("choice_probabilities: model and measure differ in size");
  return choice_probabilities_from_utilities(utilities(phi, x, nu, c), model, eps);
}

std::vector<double> choice_jacobian(std::span<const double> p, const MarginalModel& model) {
  const std::size_t n = p.size();
  std::vector<double> d(n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (p[i] > 0.0 && p[i] < 1.0) {
      d[i] = model.marginal_density_at_prob(i, p[i]);
      total += d[i];
    }
  }
  std::vector<double> jac(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    jac[i * n + i] = d[i];
    if (total > 0.0)
      for (std::size_t j = 0; j < n; ++j) jac[i * n + j] -= d[i] * d[j] / total;
  }
  return jac;
}

}  // namespace sdot
