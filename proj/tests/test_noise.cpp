#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numeric>

#include "sdot/noise/choice.hpp"
#include "sdot/noise/marginal_model.hpp"
#include "sdot/noise/smooth_transform.hpp"
#include "test_support.hpp"

using namespace sdot;

namespace {

std::vector<MarginalModel> all_models(std::vector<double> eta, double lambda) {
  return {MarginalModel::exponential(lambda, eta), MarginalModel::uniform(lambda, eta),
          MarginalModel::pareto(lambda, 1.5, eta),  MarginalModel::pareto(lambda, 3.0, eta),
          MarginalModel::pareto(lambda, 0.5, eta),  MarginalModel::hyperbolic(lambda, eta),
          MarginalModel::tdist(lambda, MarginalModel::uniform_weights(eta.size()))};
}

// Generating functions written out independently of the library.
double table_cdf(const MarginalModel& m, double s) {
  const double l = m.lambda();
  const double n = static_cast<double>(m.size());
  switch (m.kind()) {
    case ModelKind::exponential: return std::exp(s / l - 1.0);
    case ModelKind::uniform: return s / (2 * l) + 0.5;
    case ModelKind::pareto: {
      const double q = m.q();
      return std::pow(s * (q - 1) / (l * q) + 1 / q, 1 / (q - 1));
    }
    case ModelKind::hyperbolic: return std::sinh(s / l - (std::sqrt(2.0) - 1 - std::asinh(1.0)));
    case ModelKind::tdist: {
      const double v = s - l * std::sqrt(n - 1);
      return n / 2 * (1 + v / std::sqrt(l * l + v * v));
    }
  }
  return 0;
}

}  // namespace

TEST_SUITE("noise") {
  TEST_CASE("generating functions follow their closed forms") {
    std::mt19937_64 rng(1);
    for (const auto& m : all_models({0.2, 0.3, 0.5}, 0.7)) {
      for (int k = 0; k < 50; ++k) {
        const double t = std::uniform_real_distribution<double>(0.01, 0.99)(rng);
        const double s = m.quantile(t);
        CHECK(m.cdf(s) == doctest::Approx(t).epsilon(1e-12));
        CHECK(table_cdf(m, s) == doctest::Approx(t).epsilon(1e-12));
      }
    }
    CHECK(MarginalModel::uniform(10, {1.0}).cdf(0.0) == doctest::Approx(0.5));
    CHECK(MarginalModel::exponential(1, {1.0}).cdf(1.0) == doctest::Approx(1.0));
  }

  TEST_CASE("generating quantiles integrate to zero over [0, 1]") {
    boost::math::quadrature::tanh_sinh<double> integrator;
    for (const auto& m : all_models({0.25, 0.25, 0.25, 0.25}, 0.3)) {
      const double v = integrator.integrate([&](double t) { return m.quantile(t); }, 0.0, 1.0);
      CHECK(std::abs(v) < 1e-9);
    }
  }

  TEST_CASE("divergence generator is the integral of the quantile") {
    boost::math::quadrature::tanh_sinh<double> integrator;
    for (const auto& m : all_models({0.5, 0.5}, 0.4)) {
      for (double s : {0.1, 0.5, 1.0, 1.7}) {
        const double v = integrator.integrate([&](double t) { return m.quantile(t); }, 0.0, s);
        CHECK(m.divergence(s) == doctest::Approx(v).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("pareto q = 2 coincides with the uniform model") {
    const auto p = MarginalModel::pareto(0.8, 2.0, {0.5, 0.5});
    const auto u = MarginalModel::uniform(0.8, {0.5, 0.5});
    for (double s : {0.0, 0.3, 1.0, 1.9}) CHECK(p.divergence(s) == doctest::Approx(u.divergence(s)));
    for (double s : {-0.5, 0.0, 0.5}) CHECK(p.cdf(s) == doctest::Approx(u.cdf(s)));
  }

  TEST_CASE("marginal quantile examples") {
    CHECK(MarginalModel::uniform(10, {0.5, 0.5}).marginal_quantile(0, 0.75) == doctest::Approx(0.0));
    CHECK(MarginalModel::exponential(1, {0.5, 0.5}).marginal_quantile(0, 0.5) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(MarginalModel::exponential(1, {0.5, 0.5}).marginal_quantile(0, 1.0), InfiniteQuantile);
    CHECK_THROWS_AS(MarginalModel::exponential(1, {0.5, 0.5}).marginal_quantile(0, 1.5), DomainError);
  }

  TEST_CASE("marginal cdf and quantile are inverse on the interior") {
    for (const auto& m : all_models({0.6, 0.4}, 0.5)) {
      for (double t : {0.7, 0.8, 0.95}) {
        const double s = m.marginal_quantile(0, t);
        CHECK(m.marginal_cdf(0, s) == doctest::Approx(t).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("model validation") {
    CHECK_THROWS(MarginalModel::exponential(0.0, {1.0}));
    CHECK_THROWS(MarginalModel::exponential(1.0, {0.5, 0.6}));
    CHECK_THROWS(MarginalModel::exponential(1.0, {0.0, 1.0}));
    CHECK_THROWS(MarginalModel::pareto(1.0, 1.0, {1.0}));
    CHECK_THROWS(MarginalModel::pareto(1.0, -2.0, {1.0}));
    CHECK_THROWS(MarginalModel::tdist(1.0, {0.3, 0.7}));
    CHECK_THROWS_AS(MarginalModel::pareto(1.0, 2.0, {1.0}).cdf(-10.0), DomainError);
    CHECK(model_kind_from_string("tdist") == ModelKind::tdist);
    CHECK_THROWS(model_kind_from_string("gumbel"));
  }

  TEST_CASE("divergence at vertices and approximation bounds") {
    const std::size_t n = 7;
    const double lambda = 0.3;
    const auto eta = MarginalModel::uniform_weights(n);
    std::vector<double> e0(n, 0.0);
    e0[0] = 1.0;
    const auto ent = MarginalModel::exponential(lambda, eta);
    const auto chi = MarginalModel::uniform(lambda, eta);
    CHECK(discrete_f_divergence(ent, e0) == doctest::Approx(lambda * std::log(7.0)));
    CHECK(discrete_f_divergence(chi, e0) == doctest::Approx(lambda * 6.0));
    CHECK(approximation_bound(ent) == doctest::Approx(lambda * std::log(7.0)).epsilon(1e-15));
    CHECK(approximation_bound(chi) == doctest::Approx(lambda * 6.0));
    CHECK(discrete_f_divergence(ent, eta) == doctest::Approx(0.0));
    const auto td = MarginalModel::tdist(1.0, {0.5, 0.5});
    CHECK(std::isinf(td.divergence(2.5)));
  }

  TEST_CASE("lipschitz constants bound the marginal cdf slope") {
    for (const auto& m : all_models({0.7, 0.3}, 0.4)) {
      const auto L = m.lipschitz();
      if (!L) {
        CHECK(m.kind() == ModelKind::pareto);
        CHECK(m.q() > 2.0);
        continue;
      }
      double worst = 0.0;
      for (std::size_t i = 0; i < 2; ++i)
        for (double s = -5; s <= 5; s += 1e-3) {
          const double h = 1e-6;
          worst = std::max(worst, (m.marginal_cdf(i, s + h) - m.marginal_cdf(i, s - h)) / (2 * h));
        }
      CHECK(worst <= *L * (1 + 1e-6));
    }
  }

  TEST_CASE("softmax") {
    const std::vector<double> eta{0.2, 0.3, 0.5};
    const auto p = softmax_probs(std::vector<double>{1.0, 1.0, 1.0}, eta, 0.5);
    CHECK(testing::max_abs_diff(p.p, eta) < 1e-15);
    // Large utilities do not overflow.
    const auto q = softmax_probs(std::vector<double>{1000.0, 0.0, 0.0}, eta, 0.01);
    CHECK(q.p[0] == doctest::Approx(1.0));
  }

  TEST_CASE("sparsemax matches support enumeration") {
    std::mt19937_64 rng(2);
    for (int rep = 0; rep < 300; ++rep) {
      const std::size_t n = 1 + rep % 5;
      const auto u = testing::uniform_vec(rng, n, -3, 3);
      const auto eta = testing::random_simplex(rng, n);
      const auto p = sparsemax_probs(u, eta);
      CHECK(testing::max_abs_diff(p.p, testing::qp_by_support_enumeration(u, eta)) < 1e-12);
    }
    const auto eta = MarginalModel::uniform_weights(4);
    CHECK(testing::max_abs_diff(sparsemax_probs(std::vector<double>(4, 2.0), eta).p, eta) < 1e-15);
  }

  TEST_CASE("bisection agrees with the closed forms") {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 100; ++rep) {
      const std::size_t n = 2 + rep % 8;
      const auto u = testing::uniform_vec(rng, n, -2, 2);
      const auto eta = testing::random_simplex(rng, n);
      const double lambda = std::exp(std::uniform_real_distribution<double>(std::log(0.05), std::log(5.0))(rng));
      const auto b = bisection_probs(u, MarginalModel::exponential(lambda, eta), 1e-8);
      CHECK(testing::l2_diff(b.p, softmax_probs(u, eta, lambda).p) <= 1e-8);
      double total = std::accumulate(b.p.begin(), b.p.end(), 0.0);
      CHECK(total <= 1.0);
      std::vector<double> v(n);
      for (std::size_t i = 0; i < n; ++i) v[i] = u[i] / lambda;
      const auto bu = bisection_probs(u, MarginalModel::uniform(lambda, eta), 1e-8);
      CHECK(testing::l2_diff(bu.p, sparsemax_probs(v, eta).p) <= 1e-8);
    }
  }

  TEST_CASE("bisection is symmetric and reports its iteration count") {
    const auto eta = MarginalModel::uniform_weights(4);
    for (const auto& m : all_models(eta, 0.5)) {
      const auto r = bisection_probs(std::vector<double>{0.3, 0.3, 0.3, 0.3}, m, 1e-9);
      for (double p : r.p) CHECK(p == doctest::Approx(0.25).epsilon(1e-8));
      // Equal utilities give a degenerate bracket.
      CHECK(r.iterations == 0);
      CHECK(r.method == ChoiceMethod::bisection);
      CHECK(bisection_probs(std::vector<double>{0.3, -0.1, 0.0, 0.2}, m, 1e-9).iterations > 0);
    }
    CHECK_THROWS(bisection_probs(std::vector<double>{0.0, 0.0}, MarginalModel::exponential(1, {0.5, 0.5}), 0.0));
  }

  TEST_CASE("dispatch picks the right oracle") {
    const std::vector<double> u{0.1, -0.2};
    const std::vector<double> eta{0.5, 0.5};
    CHECK(choice_probabilities_from_utilities(u, MarginalModel::exponential(1, eta), 1e-6).method ==
          ChoiceMethod::closed_form);
    CHECK(choice_probabilities_from_utilities(u, MarginalModel::uniform(1, eta), 1e-6).method == ChoiceMethod::sort);
    CHECK(choice_probabilities_from_utilities(u, MarginalModel::hyperbolic(1, eta), 1e-6).method ==
          ChoiceMethod::bisection);
    // One dominant utility under the uniform model gives a vertex.
    const auto p = choice_probabilities_from_utilities(std::vector<double>{5.0, 0.0}, MarginalModel::uniform(0.1, eta), 0);
    CHECK(p.p[0] == 1.0);
    CHECK(p.p[1] == 0.0);
  }

  TEST_CASE("choice jacobian matches finite differences") {
    std::mt19937_64 rng(4);
    const auto eta = std::vector<double>{0.1, 0.2, 0.3, 0.4};
    for (const auto& m : all_models(eta, 1.0)) {
      for (int rep = 0; rep < 5; ++rep) {
        const auto u = testing::uniform_vec(rng, 4, -0.3, 0.3);
        const auto p = choice_probabilities_from_utilities(u, m, 1e-13).p;
        bool interior = true;
        for (double v : p) interior = interior && v > 1e-3;
        if (!interior) continue;
        const auto J = choice_jacobian(p, m);
        const double h = 1e-5;
        for (std::size_t k = 0; k < 4; ++k) {
          auto up = u, dn = u;
          up[k] += h;
          dn[k] -= h;
          const auto pp = choice_probabilities_from_utilities(up, m, 1e-13).p;
          const auto pm = choice_probabilities_from_utilities(dn, m, 1e-13).p;
          for (std::size_t i = 0; i < 4; ++i) CHECK(J[i * 4 + k] == doctest::Approx((pp[i] - pm[i]) / (2 * h)).epsilon(1e-4).scale(1e-3));
        }
      }
    }
  }

  TEST_CASE("smooth max") {
    std::mt19937_64 rng(6);
    const auto eta = std::vector<double>{0.25, 0.25, 0.5};
    for (int rep = 0; rep < 50; ++rep) {
      const auto u = testing::uniform_vec(rng, 3, -1, 1);
      const double lambda = 0.3;
      // Log-partition against the direct sum.
      double direct = 0;
      for (std::size_t i = 0; i < 3; ++i) direct += eta[i] * std::exp(u[i] / lambda);
      CHECK(log_partition(u, eta, lambda) == doctest::Approx(lambda * std::log(direct)).epsilon(1e-13));
      // Closed forms agree with the generic expression at their maximizers.
      for (const auto& m : {MarginalModel::exponential(lambda, eta), MarginalModel::uniform(lambda, eta)}) {
        const auto sm = smooth_max(u, m, 0.0);
        double generic = -discrete_f_divergence(m, sm.probs.p);
        for (std::size_t i = 0; i < 3; ++i) generic += u[i] * sm.probs.p[i];
        CHECK(sm.value == doctest::Approx(generic).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("simplex projection") {
    std::mt19937_64 rng(8);
    for (int rep = 0; rep < 100; ++rep) {
      const auto v = testing::uniform_vec(rng, 6, -2, 2);
      const auto p = project_to_simplex(v);
      CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0));
      // Optimality: v - p is constant on the support and no larger off it.
      double tau = 0;
      for (std::size_t i = 0; i < 6; ++i)
        if (p[i] > 0) tau = v[i] - p[i];
      for (std::size_t i = 0; i < 6; ++i) {
        CHECK(p[i] >= 0.0);
        if (p[i] > 0)
          CHECK(v[i] - p[i] == doctest::Approx(tau).epsilon(1e-12));
        else
          CHECK(v[i] <= tau + 1e-12);
      }
    }
  }

  TEST_CASE("chebyshev value in two dimensions") {
    // max over p of u1 p + u2 (1-p) + 2 lambda sqrt(p(1-p)) has the closed form
    // (u1+u2)/2 + sqrt(((u1-u2)/2)^2 + lambda^2).
    for (auto [u1, u2, l] : {std::tuple{0.3, -0.1, 0.5}, std::tuple{1.0, 1.0, 0.2}, std::tuple{-2.0, 0.5, 1.0}}) {
      const double exact = (u1 + u2) / 2 + std::sqrt((u1 - u2) * (u1 - u2) / 4 + l * l);
      CHECK(chebyshev_value(std::vector<double>{u1, u2}, l) == doctest::Approx(exact).epsilon(1e-9));
    }
  }
}
