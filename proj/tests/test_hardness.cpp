#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sdot/hardness/knapsack.hpp"
#include "test_support.hpp"

using namespace sdot;

namespace {

// Transport cost from the equal-weight nodes to t d_{y1} + (1-t) d_{y2}: send
// the nodes with the smallest c1 - c2 to y1 until mass t is used.
double sorted_two_point_value(const TwoPointCosts& c, double t) {
  const std::size_t m = c.c1.size();
  std::vector<double> diff(m);
  double base = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    diff[j] = c.c1[j] - c.c2[j];
    base += c.c2[j];
  }
  std::sort(diff.begin(), diff.end());
  double mass = t * static_cast<double>(m);
  for (std::size_t j = 0; j < m && mass > 0.0; ++j) {
    const double take = std::min(1.0, mass);
    base += take * diff[j];
    mass -= take;
  }
  return base / static_cast<double>(m);
}

}  // namespace

TEST_SUITE("hardness") {
  TEST_CASE("instance validation and second atom") {
    KnapsackInstance inst{{1.0, 2.0}, 1.0};
    const auto y = inst.second_atom();
    CHECK(y[0] == doctest::Approx(0.4));
    CHECK(y[1] == doctest::Approx(0.8));
    CHECK_THROWS(KnapsackInstance{{}, 1.0}.validate());
    CHECK_THROWS(KnapsackInstance{{0.0, 0.0}, 1.0}.validate());
    CHECK_THROWS(KnapsackInstance{{1.0}, -1.0}.validate());
  }

  TEST_CASE("exact volumes") {
    CHECK(*exact_knapsack_volume({{1.0}, 0.3}) == doctest::Approx(0.3));
    CHECK(*exact_knapsack_volume({{2.0}, 5.0}) == doctest::Approx(1.0));
    CHECK(*exact_knapsack_volume({{1.0, 1.0}, 1.0}) == doctest::Approx(0.5));
    CHECK(*exact_knapsack_volume({{2.0, 1.0}, 1.0}) == doctest::Approx(0.25));
    CHECK(*exact_knapsack_volume({{1.0, 1.0}, 1.5}) == doctest::Approx(0.875));
    CHECK(*exact_knapsack_volume({{0.0, 4.0}, 1.0}) == doctest::Approx(0.25));
    CHECK_FALSE(exact_knapsack_volume({{1.0, 1.0, 1.0}, 1.0}).has_value());
  }

  TEST_CASE("two-point value matches the sorted assignment") {
    for (const KnapsackInstance& inst : {KnapsackInstance{{1.0}, 0.3}, KnapsackInstance{{2.0, 1.0}, 1.0},
                                         KnapsackInstance{{1.0, 1.0}, 1.0, 3.0}}) {
      const auto c = two_point_costs(inst, QuadratureSpec::grid(inst.dim() == 1 ? 1000 : 60));
      for (double t : {0.0, 0.1, 0.25, 0.5, 0.77, 1.0})
        CHECK(two_point_value(c, t) == doctest::Approx(sorted_two_point_value(c, t)).epsilon(1e-8).scale(1e-8));
    }
  }

  TEST_CASE("two-point value edge cases and convexity") {
    const KnapsackInstance inst{{1.0, 1.0}, 1.0};
    const auto c = two_point_costs(inst, QuadratureSpec::grid(80));
    const double all_first = std::accumulate(c.c1.begin(), c.c1.end(), 0.0) / c.c1.size();
    CHECK(two_point_value(c, 1.0) == doctest::Approx(all_first).epsilon(1e-9));
    std::vector<double> mins(c.c1.size());
    for (std::size_t j = 0; j < mins.size(); ++j) mins[j] = std::min(c.c1[j], c.c2[j]);
    const double vol = *exact_knapsack_volume(inst);
    CHECK(two_point_value(c, vol) ==
          doctest::Approx(std::accumulate(mins.begin(), mins.end(), 0.0) / mins.size()).epsilon(1e-9));
    for (double t = 0.1; t < 0.95; t += 0.1)
      CHECK(two_point_value(c, t) <= 0.5 * (two_point_value(c, t - 0.1) + two_point_value(c, t + 0.1)) + 1e-12);
    CHECK_THROWS(two_point_value(c, 1.5));
  }

  TEST_CASE("bisector identity on grid nodes") {
    const KnapsackInstance inst{{2.0, 1.0}, 1.0};
    const auto c = two_point_costs(inst, QuadratureSpec::grid(50));
    for (std::size_t j = 0; j < c.c1.size(); ++j) {
      const double wx = 2.0 * c.nodes[j][0] + c.nodes[j][1];
      if (std::abs(wx - 1.0) > 1e-9) CHECK((c.c1[j] <= c.c2[j]) == (wx <= 1.0));
    }
  }

  TEST_CASE("binary search on a quadratic") {
    for (double delta : {0.3, 0.1, 1e-2, 1e-3, 1e-6}) {
      const auto L = static_cast<std::size_t>(std::ceil(std::log2(1.0 / delta))) + 1;
      std::size_t calls = 0;
      const auto r = binary_search_min([&](double t) { ++calls; return (t - 0.3) * (t - 0.3); }, delta);
      CHECK(r.levels == L);
      CHECK(r.oracle_calls == 2 * L);
      CHECK(calls == 2 * L);
      CHECK(std::abs(r.t_hat - 0.3) <= delta);
      CHECK(r.accuracy == delta);
    }
    // Minimizers at the ends of the interval.
    CHECK(binary_search_min([](double t) { return t; }, 1e-3).t_hat == 0.0);
    CHECK(std::abs(binary_search_min([](double t) { return -t; }, 1e-3).t_hat - 1.0) <= 1e-3);
    CHECK_THROWS(binary_search_min([](double t) { return t; }, 0.0));
    CHECK_THROWS(binary_search_min([](double t) { return t; }, 1e-3, -1.0));
  }

  TEST_CASE("binary search with a bounded oracle error") {
    const double delta = 1e-3;
    const std::size_t L = 11;
    const double h = std::ldexp(1.0, -static_cast<int>(L));
    auto g = [](double t) { return (t - 0.3) * (t - 0.3); };
    double smallest = 1e300;
    for (std::size_t l = 1; l <= (std::size_t{1} << L); ++l) {
      const double a = g(l * h) - g((l - 1) * h);
      if (a != 0.0) smallest = std::min(smallest, std::abs(a));
    }
    const double eps = smallest / 4.0;
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> noise(-eps, eps);
    for (int rep = 0; rep < 200; ++rep) {
      const auto r = binary_search_min([&](double t) { return g(t) + noise(rng); }, delta, eps);
      CHECK(r.oracle_calls == 2 * L);
      CHECK(std::abs(r.t_hat - 0.3) <= 2 * delta);
      CHECK(r.accuracy == 2 * delta);
    }
  }

  TEST_CASE("volume recovery is scale invariant") {
    const QuadratureSpec quad = QuadratureSpec::grid(200);
    const auto a = knapsack_volume_via_ot({{2.0, 1.0}, 1.0}, 1e-2, quad);
    const auto b = knapsack_volume_via_ot({{6.0, 3.0}, 3.0}, 1e-2, quad);
    CHECK(a.t_hat == doctest::Approx(0.25).epsilon(0.03 / 0.25));
    CHECK(std::abs(a.t_hat - b.t_hat) <= 1e-2);
  }

  TEST_CASE("monte carlo quadrature") {
    const auto r = knapsack_volume_via_ot({{1.0, 1.0, 1.0}, 1.0}, 1e-2, QuadratureSpec::monte_carlo(200000, 4));
    // Volume of the corner simplex is 1/6.
    CHECK(std::abs(r.t_hat - 1.0 / 6.0) <= 0.02);
    CHECK_FALSE(r.exact.has_value());
    CHECK(QuadratureSpec::monte_carlo(10, 3).describe() == "mc:10:3");
  }
}
