#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdot/core/cost.hpp"
#include "sdot/core/measure.hpp"
#include "sdot/core/sampler.hpp"
#include "sdot/noise/marginal_model.hpp"
#include "sdot/parallel/kernels.hpp"
#include "sdot/solver/step_size.hpp"

namespace sdot {

class SolverError : public std::runtime_error {
 public:
  SolverError(std::size_t iteration, const std::string& what)
      : std::runtime_error("iteration " + std::to_string(iteration) + ": " + what), iteration_(iteration) {}
  std::size_t iteration() const { return iteration_; }

 private:
  std::size_t iteration_;
};

enum class LogSchedule { geometric, every, none };

struct SolverConfig {
  std::size_t T = 1;
  RateRule rule = RateRule::lipschitz;
  double eps_bar = 0.0;
  double tikhonov = 0.0;       // unregularized path only
  RateConstants constants;     // L for smooth, M for self-concordant
  bool theorem_variant = false;
  std::optional<std::uint64_t> seed;  // overrides the sampler seed when set
  LogSchedule schedule = LogSchedule::geometric;
  bool timing = false;         // record wall-clock times in the trace
  std::optional<double> step;  // explicit step size, bypassing the rule

  double gamma() const;
};

struct TraceRecord {
  std::size_t t = 0;
  std::vector<double> phi;        // phi_t
  std::vector<double> upper_avg;  // (1/t) sum_{s=1..t} phi_s, empty at t = 0
  double walltime_ms = 0.0;
  std::optional<double> subopt;
};

struct SolverTrace {
  std::vector<TraceRecord> records;
  std::size_t samples_used = 0;
  double walltime_ms = 0.0;
  double gamma = 0.0;

  // Columns t, phi_hash, subopt_estimate, walltime_ms. Wall times are written
  // as 0 unless the run was timed.
  std::string to_csv() const;
};

// 64-bit FNV-1a over the IEEE-754 bytes of the vector, as 16 hex digits.
std::string phi_hash(std::span<const double> phi);

struct SgdResult {
  std::vector<double> lower;  // (1/T) sum_{t=1..T} phi_{t-1}
  std::vector<double> upper;  // (1/T) sum_{t=1..T} phi_t
  SolverTrace trace;
};

// Called at logged iterations with the running upper average; its value is
// stored as the trace's suboptimality estimate.
using TraceEvaluator = std::function<double(std::span<const double> upper_avg)>;

// Writes c(x_t, y_i) for the t-th sample (1-based) into the buffer.
using CostRowSource = std::function<void(std::size_t t, std::span<double> costs)>;

SgdResult averaged_sgd(const CostRowSource& rows, std::span<const double> nu_weights, const MarginalModel* model,
                       const SolverConfig& config, const TraceEvaluator& evaluator = {});

SgdResult averaged_sgd(Sampler& sampler, const DiscreteMeasure& nu, const CostSpec& c,
                       const std::optional<MarginalModel>& model, const SolverConfig& config,
                       const TraceEvaluator& evaluator = {});

SgdResult averaged_sgd(const SamplerSpec& sampler, const DiscreteMeasure& nu, const CostSpec& c,
                       const std::optional<MarginalModel>& model, const SolverConfig& config,
                       const TraceEvaluator& evaluator = {});

// Uses the first T rows of a precomputed cost matrix, one per iteration.
SgdResult averaged_sgd(const CostMatrix& costs, const DiscreteMeasure& nu, const std::optional<MarginalModel>& model,
                       const SolverConfig& config, const TraceEvaluator& evaluator = {});

}  // namespace sdot
