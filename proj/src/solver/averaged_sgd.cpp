#include "sdot/solver/averaged_sgd.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>

#include "sdot/core/c_transform.hpp"
#include "sdot/noise/choice.hpp"

namespace sdot {

double SolverConfig::gamma() const {
  if (step) {
    if (!(*step > 0.0)) throw std::invalid_argument("SolverConfig: explicit step must be positive");
    return *step;
  }
  RateConstants k = constants;
  k.eps_bar = eps_bar;
  return step_size(rule, T, eps_bar, k.L, k.G(), theorem_variant);
}

std::string phi_hash(std::span<const double> phi) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : phi) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string SolverTrace::to_csv() const {
  std::ostringstream os;
  os << "t,phi_hash,subopt_estimate,walltime_ms\n";
  char buf[64];
  for (const auto& r : records) {
    os << r.t << ',' << phi_hash(r.phi) << ',';
    if (r.subopt) {
      std::snprintf(buf, sizeof buf, "%.17g", *r.subopt);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, "%.3f", r.walltime_ms);
    os << ',' << buf << '\n';
  }
  return os.str();
}

namespace {

bool logged(LogSchedule s, std::size_t t, std::size_t T) {
  switch (s) {
    case LogSchedule::every: return true;
    case LogSchedule::none: return false;
    case LogSchedule::geometric: return t == T || (t > 0 && (t & (t - 1)) == 0);
  }
  return false;
}

}  // namespace

SgdResult averaged_sgd(const CostRowSource& rows, std::span<const double> nu_weights, const MarginalModel* model,
                       const SolverConfig& config, const TraceEvaluator& evaluator) {
  const std::size_t n = nu_weights.size();
  const std::size_t T = config.T;
  if (T == 0) throw std::invalid_argument("averaged_sgd: T must be at least 1");
  if (n == 0) throw std::invalid_argument("averaged_sgd: empty target measure");
  if (model && model->size() != n) throw DimensionMismatch("averaged_sgd: model and measure differ in size");
  if (!(config.tikhonov >= 0.0)) throw std::invalid_argument("averaged_sgd: tikhonov must be nonnegative");
  const double gamma = config.gamma();

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto elapsed_ms = [&] {
    return config.timing ? std::chrono::duration<double, std::milli>(clock::now() - start).count() : 0.0;
  };

  SgdResult res;
  res.trace.gamma = gamma;
  std::vector<double> phi(n, 0.0), sum_prev(n, 0.0), sum_curr(n, 0.0), costs(n), u(n), p(n);

  auto record = [&](std::size_t t) {
    TraceRecord r;
    r.t = t;
    r.phi = phi;
    if (t > 0) {
      r.upper_avg.resize(n);
      for (std::size_t i = 0; i < n; ++i) r.upper_avg[i] = sum_curr[i] / static_cast<double>(t);
      if (evaluator) r.subopt = evaluator(r.upper_avg);
    }
    r.walltime_ms = elapsed_ms();
    res.trace.records.push_back(std::move(r));
  };

  if (config.schedule == LogSchedule::every) record(0);
  for (std::size_t t = 1; t <= T; ++t) {
    try {
      rows(t, costs);
      for (std::size_t i = 0; i < n; ++i) {
        sum_prev[i] += phi[i];
        u[i] = phi[i] - costs[i];
      }
      if (model) {
        const double eps_t = config.eps_bar / (2.0 * std::sqrt(static_cast<double>(t)));
        const auto cp = choice_probabilities_from_utilities(u, *model, eps_t);
        std::copy(cp.p.begin(), cp.p.end(), p.begin());
      } else {
        std::fill(p.begin(), p.end(), 0.0);
        p[max_with_index(u).winner] = 1.0;
        for (std::size_t i = 0; i < n; ++i) p[i] += 2.0 * config.tikhonov * phi[i];
      }
      for (std::size_t i = 0; i < n; ++i) {
        phi[i] += gamma * (nu_weights[i] - p[i]);
        sum_curr[i] += phi[i];
      }
      for (double v : phi)
        if (!std::isfinite(v)) throw std::runtime_error("non-finite potential");
    } catch (const SolverError&) {
      throw;
    } catch (const std::exception& e) {
      throw SolverError(t, e.what());
    }
    if (logged(config.schedule, t, T)) record(t);
  }

  res.lower.resize(n);
  res.upper.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    res.lower[i] = sum_prev[i] / static_cast<double>(T);
    res.upper[i] = sum_curr[i] / static_cast<double>(T);
  }
  res.trace.samples_used = T;
  res.trace.walltime_ms = elapsed_ms();
  return res;
}

SgdResult averaged_sgd(Sampler& sampler, const DiscreteMeasure& nu, const CostSpec& c,
                       const std::optional<MarginalModel>& model, const SolverConfig& config,
                       const TraceEvaluator& evaluator) {
  if (sampler.dim() != nu.dim()) throw DimensionMismatch("averaged_sgd: sampler and atoms differ in dimension");
  std::vector<double> x(nu.dim());
  CostRowSource rows = [&](std::size_t, std::span<double> out) {
    sampler.next(x);
    for (std::size_t i = 0; i < nu.size(); ++i) out[i] = eval_cost(x, nu.atom(i), c);
  };
  return averaged_sgd(rows, nu.weights(), model ? &*model : nullptr, config, evaluator);
}

SgdResult averaged_sgd(const SamplerSpec& spec, const DiscreteMeasure& nu, const CostSpec& c,
                       const std::optional<MarginalModel>& model, const SolverConfig& config,
                       const TraceEvaluator& evaluator) {
  Sampler sampler(config.seed ? spec.with_seed(*config.seed) : spec);
  return averaged_sgd(sampler, nu, c, model, config, evaluator);
}

SgdResult averaged_sgd(const CostMatrix& costs, const DiscreteMeasure& nu, const std::optional<MarginalModel>& model,
                       const SolverConfig& config, const TraceEvaluator& evaluator) {
  if (costs.rows() < config.T) throw std::invalid_argument("averaged_sgd: fewer cost rows than iterations");
  if (costs.cols() != nu.size()) throw DimensionMismatch("averaged_sgd: cost matrix and measure differ in size");
  CostRowSource rows = [&](std::size_t t, std::span<double> out) {
    const auto r = costs.row(t - 1);
    std::copy(r.begin(), r.end(), out.begin());
  };
  return averaged_sgd(rows, nu.weights(), model ? &*model : nullptr, config, evaluator);
}

}  // namespace sdot
