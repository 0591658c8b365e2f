#include "sdot/noise/smooth_transform.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>

#include "sdot/core/c_transform.hpp"

namespace sdot {

double log_partition(std::span<const double> u, std::span<const double> eta, double lambda) {
  if (u.size() != eta.size() || u.empty()) throw std::invalid_argument("log_partition: length mismatch");
  const double m = *std::max_element(u.begin(), u.end());
  double z = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) z += eta[i] * std::exp((u[i] - m) / lambda);
  return m + lambda * std::log(z);
}

double spmax(std::span<const double> v, std::span<const double> eta) {
  const auto r = sparsemax_probs(v, eta);
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * r.p[i] - r.p[i] * r.p[i] / eta[i];
  return s;
}

SmoothMax smooth_max(std::span<const double> u, const MarginalModel& model, double eps) {
  if (u.size() != model.size()) throw std::invalid_argument("smooth_max: utilities and model differ in length");
  SmoothMax out;
  const double lambda = model.lambda();
  switch (model.kind()) {
    case ModelKind::exponential:
      out.probs = softmax_probs(u, model.eta(), lambda);
      out.value = log_partition(u, model.eta(), lambda);
      return out;
    case ModelKind::uniform: {
      std::vector<double> v(u.begin(), u.end());
      for (double& x : v) x /= lambda;
      out.probs = sparsemax_probs(v, model.eta());
      double s = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i)
        s += v[i] * out.probs.p[i] - out.probs.p[i] * out.probs.p[i] / model.eta(i);
      out.value = lambda + lambda * s;
      return out;
    }
    default: {
      out.probs = bisection_probs(u, model, eps);
      double s = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * out.probs.p[i];
      out.value = s - discrete_f_divergence(model, out.probs.p);
      return out;
    }
  }
}

double smooth_c_transform(std::span<const double> phi, std::span<const double> x, const DiscreteMeasure& nu,
                          const CostSpec& c, const MarginalModel& model, double eps) {
  if (model.size() != nu.size()) throw DimensionMismatch("smooth_c_transform: model and measure differ in size");
  return smooth_max(utilities(phi, x, nu, c), model, eps).value;
}

std::vector<double> project_to_simplex(std::span<const double> v) {
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    cum += s[j];
    const double t = (cum - 1.0) / static_cast<double>(j + 1);
    if (s[j] - t > 0.0) theta = t;
  }
  std::vector<double> p(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) p[i] = std::max(0.0, v[i] - theta);
  return p;
}

namespace {

double chebyshev_objective(std::span<const double> u, double lambda, std::span<const double> p) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * p[i] + lambda * std::sqrt(std::max(0.0, p[i] * (1.0 - p[i])));
  return s;
}

void chebyshev_gradient(std::span<const double> u, double lambda, std::span<const double> p, std::span<double> g) {
  constexpr double kFloor = 1e-30;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double q = std::clamp(p[i], kFloor, 1.0 - 1e-16);
    g[i] = u[i] + lambda * (1.0 - 2.0 * q) / (2.0 * std::sqrt(q * (1.0 - q)));
  }
}

}  // namespace

double chebyshev_value(std::span<const double> u, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("chebyshev_value: lambda must be positive");
  const std::size_t n = u.size();
  if (n == 0) throw std::invalid_argument("chebyshev_value: empty utilities");
  if (n == 1) return u[0];

  constexpr std::size_t kMaxIter = 200000;
  constexpr std::size_t kMemory = 10;
  constexpr double kArmijo = 1e-4;

  std::vector<double> p(n, 1.0 / static_cast<double>(n)), g(n), trial(n), step(n), g_new(n);
  chebyshev_gradient(u, lambda, p, g);
  double f = chebyshev_objective(u, lambda, p);
  double best = f;
  std::deque<double> recent{f};
  double s = 1.0;

  for (std::size_t it = 0; it < kMaxIter; ++it) {
    for (std::size_t i = 0; i < n; ++i) trial[i] = p[i] + s * g[i];
    const auto target = project_to_simplex(trial);
    double dir_norm = 0.0, slope = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      step[i] = target[i] - p[i];
      dir_norm = std::max(dir_norm, std::abs(step[i]));
      slope += g[i] * step[i];
    }
    if (dir_norm < 1e-15) break;

    const double ref = *std::min_element(recent.begin(), recent.end());
    double alpha = 1.0, f_new = 0.0;
    bool accepted = false;
    for (int k = 0; k < 60 && !accepted; ++k) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = p[i] + alpha * step[i];
      f_new = chebyshev_objective(u, lambda, trial);
      accepted = f_new >= ref + kArmijo * alpha * slope;
      if (!accepted) alpha *= 0.5;
    }
    if (!accepted) break;

    chebyshev_gradient(u, lambda, trial, g_new);
    double ss = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dp = trial[i] - p[i];
      ss += dp * dp;
      sy += dp * (g_new[i] - g[i]);
    }
    s = sy < 0.0 ? std::clamp(ss / -sy, 1e-20, 1e20) : 1.0;
    p = trial;
    g = g_new;
    f = f_new;
    best = std::max(best, f);
    recent.push_back(f);
    if (recent.size() > kMemory) recent.pop_front();
  }
  return best;
}

}  // namespace sdot
