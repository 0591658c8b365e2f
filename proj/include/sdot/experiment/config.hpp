#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sdot/core/cost.hpp"
#include "sdot/core/measure.hpp"
#include "sdot/core/sampler.hpp"
#include "sdot/io/json_io.hpp"
#include "sdot/noise/marginal_model.hpp"
#include "sdot/solver/step_size.hpp"

namespace sdot {

inline constexpr int kConfigSchemaVersion = 1;

// N atoms drawn uniformly from [low, high]^dim with their own seed.
struct RandomAtoms {
  std::size_t count = 10;
  std::size_t dim = 2;
  double low = -1.0, high = 1.0;
  std::uint64_t seed = 0;
  bool operator==(const RandomAtoms&) const = default;
};

struct ModelEntry {
  std::string tag;
  std::optional<Json> model;           // absent: unregularized
  std::optional<RateRule> rule;        // default chosen from the model
  std::optional<double> concordance;   // M for the self-concordant rule
  double eps_bar = 0.1;                // bisection budget, ignored by exact oracles

  bool operator==(const ModelEntry&) const = default;
};

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  SamplerSpec sampler;
  std::variant<DiscreteMeasure, RandomAtoms> measure;
  CostSpec cost;
  std::vector<ModelEntry> models;
  std::vector<std::size_t> T_grid;
  std::vector<std::uint64_t> seeds;
  std::size_t reference_multiplier = 10;
  std::size_t sgd_reference_factor = 50;
  double tikhonov = 1e-8;
  std::string output_dir = "results";

  void validate() const;
  DiscreteMeasure target_measure() const;
};

Json to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const Json& j);
ExperimentConfig load_config(const std::string& path);

// The acceptance-scale convergence study: standard Gaussian in R^2, ten
// uniform atoms on [-1,1]^2, sup-norm cost, lambda = 0.1, uniform eta.
ExperimentConfig default_convergence_config();

// Effective step-size rule for an entry (explicit or derived from the model).
RateRule effective_rule(const ModelEntry& e, const std::optional<MarginalModel>& model);
// Whether the rule's guarantee is stated for the lower average phi_lower.
bool evaluates_lower_average(RateRule rule);

}  // namespace sdot
