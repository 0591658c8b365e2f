#include "sdot/hardness/knapsack.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sdot/core/cost.hpp"
#include "sdot/core/sampler.hpp"
#include "sdot/parallel/kernels.hpp"

namespace sdot {

namespace {

constexpr std::size_t kMaxNodes = 20000000;

double norm_power(std::span<const double> x, std::span<const double> y, double p) {
  return eval_cost(x, y, CostSpec::pnorm(p));
}

}  // namespace

void KnapsackInstance::validate() const {
  if (w.empty()) throw std::invalid_argument("KnapsackInstance: empty weight vector");
  bool positive = false;
  for (double v : w) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("KnapsackInstance: weights must be nonnegative");
    positive = positive || v > 0.0;
  }
  if (!positive) throw std::invalid_argument("KnapsackInstance: weights must not all be zero");
  if (!(b > 0.0) || !std::isfinite(b)) throw std::invalid_argument("KnapsackInstance: b must be positive");
  if (!(p >= 1.0)) throw std::invalid_argument("KnapsackInstance: exponent p must be >= 1");
}

std::vector<double> KnapsackInstance::second_atom() const {
  double sq = 0.0;
  for (double v : w) sq += v * v;
  std::vector<double> y(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) y[k] = 2.0 * b * w[k] / sq;
  return y;
}

std::string QuadratureSpec::describe() const {
  if (kind == QuadratureKind::grid) return "grid:" + std::to_string(resolution);
  return "mc:" + std::to_string(resolution) + ":" + std::to_string(seed);
}

TwoPointCosts two_point_costs(const KnapsackInstance& inst, const QuadratureSpec& quad) {
  inst.validate();
  const std::size_t d = inst.dim();
  if (quad.resolution == 0) throw std::invalid_argument("QuadratureSpec: resolution must be positive");
  TwoPointCosts out;
  if (quad.kind == QuadratureKind::grid) {
    if (d > 3) throw std::invalid_argument("grid quadrature supports d <= 3");
    std::size_t count = 1;
    for (std::size_t k = 0; k < d; ++k) count *= quad.resolution;
    if (count > kMaxNodes) throw std::length_error("grid quadrature: too many nodes");
    std::vector<double> flat(count * d);
    for (std::size_t j = 0; j < count; ++j) {
      std::size_t r = j;
      for (std::size_t k = 0; k < d; ++k) {
        flat[j * d + k] = (static_cast<double>(r % quad.resolution) + 0.5) / static_cast<double>(quad.resolution);
        r /= quad.resolution;
      }
    }
    out.nodes = PointSet(d, std::move(flat));
  } else {
    if (quad.resolution > kMaxNodes) throw std::length_error("monte carlo quadrature: too many nodes");
    out.nodes = draw(SamplerSpec::hypercube(d, quad.seed), quad.resolution);
  }

  const std::vector<double> y1(d, 0.0);
  const std::vector<double> y2 = inst.second_atom();
  const std::size_t m = out.nodes.size();
  out.c1.resize(m);
  out.c2.resize(m);
  const auto mi = static_cast<std::ptrdiff_t>(m);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < mi; ++j) {
    out.c1[j] = norm_power(out.nodes[j], y1, inst.p);
    out.c2[j] = norm_power(out.nodes[j], y2, inst.p);
  }

  std::vector<double> corner(d);
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    for (std::size_t k = 0; k < d; ++k) corner[k] = (mask >> k) & 1U ? 1.0 : 0.0;
    out.max_cost = std::max({out.max_cost, norm_power(corner, y1, inst.p), norm_power(corner, y2, inst.p)});
  }
  return out;
}

double two_point_value(const TwoPointCosts& costs, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("two_point_value: t must lie in [0, 1]");
  auto h = [&](double delta) { return t * delta - hinge_mean(delta, costs.c1, costs.c2); };
  // Golden-section search for the concave maximum over [-D, D].
  const double bound = 2.0 * costs.max_cost;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = -bound, b = bound;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = h(x1), f2 = h(x2);
  while (b - a > 1e-10) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = h(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = h(x1);
    }
  }
  return std::max({f1, f2, h(0.5 * (a + b))});
}

double wc_two_point(const KnapsackInstance& inst, double t, const QuadratureSpec& quad) {
  return two_point_value(two_point_costs(inst, quad), t);
}

BinarySearchResult binary_search_min(const std::function<double(double)>& g, double delta, double oracle_error) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("binary_search_min: delta must lie in (0, 1)");
  if (!(oracle_error >= 0.0)) throw std::invalid_argument("binary_search_min: oracle_error must be nonnegative");
  BinarySearchResult res;
  res.accuracy = oracle_error > 0.0 ? 2.0 * delta : delta;
  res.levels = static_cast<std::size_t>(std::ceil(std::log2(1.0 / delta))) + 1;
  if (res.levels > 60) throw std::invalid_argument("binary_search_min: delta too small");
  const std::size_t L = res.levels;
  const double h = std::ldexp(1.0, -static_cast<int>(L));
  auto eval = [&](std::size_t l) {
    ++res.oracle_calls;
    return g(static_cast<double>(l) * h);
  };
  // Invariant: a_lo <= 0 (a_0 taken as -inf) and a_hi > 0 (a_{2^L} as +inf),
  // where a_l = g(t_l) - g(t_{l-1}).
  std::size_t lo = 0, hi = std::size_t{1} << L;
  for (std::size_t k = 0; k < L; ++k) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const double a_mid = eval(mid) - eval(mid - 1);
    if (a_mid <= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  res.t_hat = static_cast<double>(lo) * h;
  return res;
}

VolumeResult knapsack_volume_via_ot(const KnapsackInstance& inst, double delta, const QuadratureSpec& quad) {
  const auto costs = two_point_costs(inst, quad);
  const auto bs = binary_search_min([&](double t) { return two_point_value(costs, t); }, delta);
  VolumeResult res;
  res.t_hat = bs.t_hat;
  res.oracle_calls = bs.oracle_calls;
  res.delta = delta;
  res.exact = exact_knapsack_volume(inst);
  return res;
}

std::optional<double> exact_knapsack_volume(const KnapsackInstance& inst) {
  inst.validate();
  const auto& w = inst.w;
  const double b = inst.b;
  if (w.size() == 1) return std::clamp(b / w[0], 0.0, 1.0);
  if (w.size() != 2) return std::nullopt;
  // Area = int_0^1 clamp((b - w1 x) / w2, 0, 1) dx, integrand piecewise linear.
  double w1 = w[0], w2 = w[1];
  if (w2 == 0.0) std::swap(w1, w2);
  if (w1 == 0.0) return std::clamp(b / w2, 0.0, 1.0);
  auto f = [&](double x) { return std::clamp((b - w1 * x) / w2, 0.0, 1.0); };
  std::vector<double> knots{0.0, 1.0, (b - w2) / w1, b / w1};
  std::vector<double> inside;
  for (double k : knots)
    if (k >= 0.0 && k <= 1.0) inside.push_back(k);
  std::sort(inside.begin(), inside.end());
  double area = 0.0;
  for (std::size_t k = 1; k < inside.size(); ++k)
    area += 0.5 * (f(inside[k - 1]) + f(inside[k])) * (inside[k] - inside[k - 1]);
  return area;
}

}  // namespace sdot
