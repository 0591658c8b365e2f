#include <doctest.h>

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "sdot/noise/choice.hpp"
#include "sdot/parallel/kernels.hpp"
#include "sdot/solver/averaged_sgd.hpp"
#include "sdot/solver/dual_objective.hpp"
#include "sdot/solver/nesterov.hpp"
#include "sdot/solver/network_simplex.hpp"
#include "sdot/solver/reference.hpp"
#include "sdot/solver/step_size.hpp"
#include "test_support.hpp"

using namespace sdot;

namespace {

CostMatrix random_costs(std::mt19937_64& rng, std::size_t m, std::size_t n) {
  return CostMatrix(m, n, testing::uniform_vec(rng, m * n, 0.0, 1.0));
}

// Checks primal feasibility, dual feasibility and a zero duality gap.
void check_ot_certificate(const ExactOtResult& r, const std::vector<double>& mu, const std::vector<double>& nu,
                          const CostMatrix& c) {
  std::vector<double> row(mu.size(), 0.0), col(nu.size(), 0.0);
  double primal = 0.0;
  for (const auto& e : r.plan) {
    CHECK(e.mass > 0.0);
    row[e.source] += e.mass;
    col[e.target] += e.mass;
    primal += e.mass * c(e.source, e.target);
  }
  CHECK(testing::max_abs_diff(row, mu) < 1e-12);
  CHECK(testing::max_abs_diff(col, nu) < 1e-12);
  CHECK(primal == doctest::Approx(r.value).epsilon(1e-12));
  double worst = -1e300;
  for (std::size_t j = 0; j < mu.size(); ++j)
    for (std::size_t i = 0; i < nu.size(); ++i) worst = std::max(worst, r.phi[i] - r.psi[j] - c(j, i));
  CHECK(worst <= 1e-10);
  double dual = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i) dual += nu[i] * r.phi[i];
  for (std::size_t j = 0; j < mu.size(); ++j) dual -= mu[j] * r.psi[j];
  CHECK(dual == doctest::Approx(primal).epsilon(1e-10).scale(1.0));
}

double best_assignment(const CostMatrix& c) {
  std::vector<std::size_t> perm(c.rows());
  std::iota(perm.begin(), perm.end(), 0);
  double best = 1e300;
  do {
    double s = 0.0;
    for (std::size_t j = 0; j < perm.size(); ++j) s += c(j, perm[j]);
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(c.rows());
}

// Gradient of the empirical entropic dual, written directly.
std::vector<double> entropic_gradient(const std::vector<double>& phi, const std::vector<double>& nu,
                                      const CostMatrix& c, double lambda) {
  std::vector<double> g = nu;
  const double m = static_cast<double>(c.rows());
  for (std::size_t j = 0; j < c.rows(); ++j) {
    std::vector<double> w(nu.size());
    double z = 0.0, top = -1e300;
    for (std::size_t i = 0; i < nu.size(); ++i) top = std::max(top, (phi[i] - c(j, i)) / lambda);
    for (std::size_t i = 0; i < nu.size(); ++i) z += w[i] = nu[i] * std::exp((phi[i] - c(j, i)) / lambda - top);
    for (std::size_t i = 0; i < nu.size(); ++i) g[i] -= w[i] / z / m;
  }
  return g;
}

}  // namespace

TEST_SUITE("solver") {
  TEST_CASE("step sizes") {
    CHECK(step_size(RateRule::lipschitz, 100, 0.0) == doctest::Approx(1.0 / 40.0));
    CHECK(step_size(RateRule::lipschitz, 100, 0.1) == doctest::Approx(1.0 / 42.0));
    CHECK(step_size(RateRule::lipschitz, 100, 0.0, {}, {}, true) == doctest::Approx(1.0 / 80.0));
    CHECK(step_size(RateRule::smooth, 400, 0.0, 10.0) == doctest::Approx(1.0 / 50.0));
    CHECK(step_size(RateRule::self_concordant, 4, 0.0, {}, 3.0) == doctest::Approx(1.0 / 36.0));
    CHECK_THROWS(step_size(RateRule::smooth, 4, 0.0));
    CHECK_THROWS(step_size(RateRule::lipschitz, 0, 0.0));
    RateConstants k;
    k.M = 1.0;
    k.eps_bar = 0.5;
    CHECK(k.G() == doctest::Approx(2.5));
    k.M = 4.0;
    CHECK(k.G() == doctest::Approx(4.0));
    CHECK(rate_rule_from_string("self_concordant") == RateRule::self_concordant);
  }

  TEST_CASE("phi hash is FNV-1a over the bytes") {
    const std::vector<double> v{1.5, -2.0};
    std::uint64_t h = 14695981039346656037ULL;
    unsigned char bytes[16];
    std::memcpy(bytes, v.data(), 16);
    for (unsigned char b : bytes) h = (h ^ b) * 1099511628211ULL;
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    CHECK(phi_hash(v) == std::string(buf));
    CHECK(phi_hash(std::vector<double>{}) == "cbf29ce484222325");
  }

  TEST_CASE("unregularized step moves toward the target weights") {
    // Two atoms, every sample closest to atom 0.
    const std::vector<double> nu{0.25, 0.75};
    CostRowSource rows = [](std::size_t, std::span<double> out) {
      out[0] = 0.0;
      out[1] = 1.0;
    };
    SolverConfig sc;
    sc.T = 2;
    sc.step = 0.1;
    sc.schedule = LogSchedule::every;
    const auto r = averaged_sgd(rows, nu, nullptr, sc);
    // phi_1 = 0.1 (nu - e_0) = (-0.075, 0.075), phi_2 = (-0.15, 0.15).
    CHECK(r.trace.records.size() == 3);
    CHECK(r.trace.records[1].phi[0] == doctest::Approx(-0.075));
    CHECK(r.trace.records[2].phi[1] == doctest::Approx(0.15));
    CHECK(r.lower[0] == doctest::Approx(-0.0375));
    CHECK(r.upper[0] == doctest::Approx(-0.1125));
  }

  TEST_CASE("sgd is deterministic under a fixed seed") {
    std::mt19937_64 rng(11);
    const auto nu = testing::random_measure(rng, 5, 2, false);
    const auto model = MarginalModel::hyperbolic(0.2, testing::weights_of(nu));
    SolverConfig sc;
    sc.T = 500;
    sc.eps_bar = 0.1;
    sc.rule = RateRule::smooth;
    sc.constants.L = model.lipschitz();
    const auto a = averaged_sgd(SamplerSpec::gaussian(2, 3), nu, CostSpec::pnorm(2), model, sc);
    const auto b = averaged_sgd(SamplerSpec::gaussian(2, 3), nu, CostSpec::pnorm(2), model, sc);
    CHECK(a.trace.to_csv() == b.trace.to_csv());
    CHECK(a.upper == b.upper);
    const auto c = averaged_sgd(SamplerSpec::gaussian(2, 4), nu, CostSpec::pnorm(2), model, sc);
    CHECK(a.upper != c.upper);
    // Geometric logging ends on T.
    CHECK(a.trace.records.back().t == 500);
    CHECK(a.trace.to_csv().rfind("t,phi_hash,subopt_estimate,walltime_ms\n", 0) == 0);
  }

  TEST_CASE("sgd reports the failing iteration") {
    CostRowSource rows = [](std::size_t t, std::span<double> out) {
      out[0] = 0.0;
      out[1] = t == 3 ? NAN : 1.0;
    };
    SolverConfig sc;
    sc.T = 5;
    sc.step = 0.1;
    const std::vector<double> nu{0.5, 0.5};
    const auto model = MarginalModel::exponential(1.0, nu);
    try {
      averaged_sgd(rows, nu, &model, sc);
      FAIL("expected a solver error");
    } catch (const SolverError& e) {
      CHECK(e.iteration() == 3);
    }
  }

  TEST_CASE("parallel kernels agree with the serial reference") {
    std::mt19937_64 rng(12);
    const auto nu = testing::random_measure(rng, 7, 3, false);
    const auto xs = draw(SamplerSpec::gaussian(3, 5), 5000);
    const auto cs = CostMatrix::build(xs, nu, CostSpec::pnorm(2), ExecPolicy::serial);
    const auto cp = CostMatrix::build(xs, nu, CostSpec::pnorm(2), ExecPolicy::parallel);
    for (std::size_t j : {0, 1023, 1024, 4999})
      for (std::size_t i = 0; i < 7; ++i) CHECK(cs(j, i) == cp(j, i));
    const auto phi = testing::uniform_vec(rng, 7, -0.5, 0.5);
    const auto model = MarginalModel::exponential(0.3, testing::weights_of(nu));
    for (const MarginalModel* m : {static_cast<const MarginalModel*>(nullptr), &model}) {
      const auto s = accumulate_dual_terms(phi, cs, {}, m, 0.0, true, ExecPolicy::serial);
      const auto p = accumulate_dual_terms(phi, cs, {}, m, 0.0, true, ExecPolicy::parallel);
      CHECK(p.value_sum == doctest::Approx(s.value_sum).epsilon(1e-12));
      CHECK(testing::max_abs_diff(p.grad_sum, s.grad_sum) < 1e-9);
      // Block-ordered reductions do not depend on the thread count.
      omp_set_num_threads(3);
      const auto p3 = accumulate_dual_terms(phi, cs, {}, m, 0.0, true, ExecPolicy::parallel);
      omp_set_num_threads(1);
      const auto p1 = accumulate_dual_terms(phi, cs, {}, m, 0.0, true, ExecPolicy::parallel);
      CHECK(p3.value_sum == p1.value_sum);
      CHECK(p3.grad_sum == p1.grad_sum);
    }
    const auto c1 = testing::uniform_vec(rng, 3000, 0, 1), c2 = testing::uniform_vec(rng, 3000, 0, 1);
    CHECK(hinge_mean(0.2, c1, c2, ExecPolicy::parallel) ==
          doctest::Approx(hinge_mean(0.2, c1, c2, ExecPolicy::serial)).epsilon(1e-13));
  }

  TEST_CASE("dual objective gradient matches finite differences") {
    std::mt19937_64 rng(13);
    const auto nu = testing::random_measure(rng, 4, 2, false);
    const auto xs = draw(SamplerSpec::gaussian(2, 8), 200);
    const auto costs = CostMatrix::build(xs, nu, CostSpec::pnorm(2));
    const auto phi = testing::uniform_vec(rng, 4, -0.3, 0.3);
    for (const auto& model : {MarginalModel::exponential(0.5, testing::weights_of(nu)), MarginalModel::uniform(0.5, testing::weights_of(nu)),
                              MarginalModel::tdist(0.5, MarginalModel::uniform_weights(4))}) {
      const auto og = dual_objective_and_gradient(phi, testing::weights_of(nu), costs, {}, &model, 1e-13);
      for (std::size_t k = 0; k < 4; ++k) {
        auto up = phi, dn = phi;
        up[k] += 1e-6;
        dn[k] -= 1e-6;
        const double fd = (dual_objective_and_gradient(up, testing::weights_of(nu), costs, {}, &model, 1e-13).value -
                           dual_objective_and_gradient(dn, testing::weights_of(nu), costs, {}, &model, 1e-13).value) /
                          2e-6;
        CHECK(og.grad[k] == doctest::Approx(fd).epsilon(1e-5).scale(1e-4));
      }
    }
  }

  TEST_CASE("assignment and network simplex agree with brute force") {
    std::mt19937_64 rng(14);
    for (int rep = 0; rep < 30; ++rep) {
      const std::size_t m = 2 + rep % 5;
      const auto c = random_costs(rng, m, m);
      const std::vector<double> w(m, 1.0 / static_cast<double>(m));
      const double exact = best_assignment(c);
      for (auto alg : {OtAlgorithm::assignment, OtAlgorithm::network_simplex}) {
        const auto r = exact_discrete_ot(w, w, c, kDefaultMaxArcs, alg);
        CHECK(r.value == doctest::Approx(exact).epsilon(1e-12));
        check_ot_certificate(r, w, w, c);
      }
    }
  }

  TEST_CASE("capacitated instances") {
    std::mt19937_64 rng(15);
    for (int rep = 0; rep < 20; ++rep) {
      const std::size_t m = 60, n = 4;
      const std::vector<double> mu(m, 1.0 / m);
      const std::vector<double> nu{0.1, 0.25, 0.4, 0.25};
      REQUIRE(integral_capacities(mu, nu).has_value());
      const auto c = random_costs(rng, m, n);
      const auto a = exact_discrete_ot(mu, nu, c, kDefaultMaxArcs, OtAlgorithm::assignment);
      const auto b = exact_discrete_ot(mu, nu, c, kDefaultMaxArcs, OtAlgorithm::network_simplex);
      CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));
      check_ot_certificate(a, mu, nu, c);
      check_ot_certificate(b, mu, nu, c);
    }
    CHECK_FALSE(integral_capacities(std::vector<double>(3, 1.0 / 3), std::vector<double>{0.5, 0.5}).has_value());
    CHECK_THROWS(exact_discrete_ot(std::vector<double>(3, 1.0 / 3), std::vector<double>{0.5, 0.5},
                                   CostMatrix(3, 2, std::vector<double>(6, 1.0)), kDefaultMaxArcs,
                                   OtAlgorithm::assignment));
  }

  TEST_CASE("network simplex on general weights") {
    std::mt19937_64 rng(16);
    for (int rep = 0; rep < 30; ++rep) {
      const std::size_t m = 3 + rep % 6, n = 2 + rep % 4;
      const auto mu = testing::random_simplex(rng, m), nu = testing::random_simplex(rng, n);
      const auto c = random_costs(rng, m, n);
      check_ot_certificate(exact_discrete_ot(mu, nu, c), mu, nu, c);
    }
  }

  TEST_CASE("minimum-norm potential lies on the optimal face") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 10; ++rep) {
      const std::size_t m = 40, n = 5;
      const std::vector<double> mu(m, 1.0 / m);
      const std::vector<double> nu(n, 0.2);
      const auto c = random_costs(rng, m, n);
      const auto ot = exact_discrete_ot(mu, nu, c);
      const auto phi = min_norm_optimal_potential(ot, c);
      // Dual value nu.phi - mean_j max_i (phi_i - c_ji) equals the LP value.
      double v = std::inner_product(nu.begin(), nu.end(), phi.begin(), 0.0);
      for (std::size_t j = 0; j < m; ++j) {
        double best = -1e300;
        for (std::size_t i = 0; i < n; ++i) best = std::max(best, phi[i] - c(j, i));
        v -= best / m;
      }
      CHECK(v == doctest::Approx(ot.value).epsilon(1e-9));
      CHECK(std::accumulate(phi.begin(), phi.end(), 0.0) == doctest::Approx(0.0).scale(1.0));
      double sq = 0, sq_lp = 0, mean_lp = std::accumulate(ot.phi.begin(), ot.phi.end(), 0.0) / n;
      for (std::size_t i = 0; i < n; ++i) {
        sq += phi[i] * phi[i];
        sq_lp += (ot.phi[i] - mean_lp) * (ot.phi[i] - mean_lp);
      }
      CHECK(sq <= sq_lp + 1e-12);
    }
  }

  TEST_CASE("accelerated gradient reaches a stationary point") {
    std::mt19937_64 rng(18);
    const auto nu = testing::random_measure(rng, 5, 2, false);
    const auto xs = draw(SamplerSpec::gaussian(2, 9), 300);
    const auto costs = CostMatrix::build(xs, nu, CostSpec::pnorm(2));
    const auto model = MarginalModel::exponential(0.2, testing::weights_of(nu));
    const auto r = nesterov_agd(testing::weights_of(nu), costs, {}, model);
    CHECK(r.converged);
    const auto g = entropic_gradient(r.phi, testing::weights_of(nu), costs, 0.2);
    double norm = 0;
    for (double v : g) norm += v * v;
    CHECK(std::sqrt(norm) < 1e-6);
    CHECK(std::accumulate(r.phi.begin(), r.phi.end(), 0.0) == doctest::Approx(0.0).scale(1.0));

    const auto chi = MarginalModel::uniform(0.2, testing::weights_of(nu));
    const auto rc = nesterov_agd(testing::weights_of(nu), costs, {}, chi);
    CHECK(rc.converged);
    const auto og = dual_objective_and_gradient(rc.phi, testing::weights_of(nu), costs, {}, &chi);
    for (double v : og.grad) CHECK(std::abs(v) < 1e-6);
  }

  TEST_CASE("finite-sample reference picks the method by model") {
    std::mt19937_64 rng(19);
    const auto nu = DiscreteMeasure::uniform(PointSet(2, testing::uniform_vec(rng, 8, -1, 1)));
    const auto xs = draw(SamplerSpec::gaussian(2, 10), 400);
    const auto costs = CostMatrix::build(xs, nu, CostSpec::sup_norm());
    ReferenceOptions ro;
    ro.T = 40;
    CHECK(finite_sample_reference(nu, costs, std::nullopt, ro).method == ReferenceMethod::linear_program);
    CHECK(finite_sample_reference(nu, costs, MarginalModel::uniform(0.1, testing::weights_of(nu)), ro).method ==
          ReferenceMethod::accelerated_gradient);
    const auto hyp = finite_sample_reference(nu, costs, MarginalModel::hyperbolic(0.1, testing::weights_of(nu)), ro);
    CHECK(hyp.method == ReferenceMethod::long_sgd);
    CHECK(hyp.phi.size() == 4);
  }
}
