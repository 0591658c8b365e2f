#include "sdot/experiment/config.hpp"

#include <fstream>
#include <set>

namespace sdot {

void ExperimentConfig::validate() const {
  if (schema_version != kConfigSchemaVersion)
    throw SchemaError("schema_version", "unsupported version " + std::to_string(schema_version));
  if (T_grid.empty()) throw SchemaError("T_grid", "must not be empty");
  for (std::size_t k = 0; k < T_grid.size(); ++k) {
    if (T_grid[k] == 0) throw SchemaError("T_grid", "entries must be positive");
    if (k > 0 && T_grid[k] <= T_grid[k - 1]) throw SchemaError("T_grid", "must be strictly increasing");
  }
  if (seeds.empty()) throw SchemaError("seeds", "at least one seed is required");
  if (models.empty()) throw SchemaError("models", "at least one model is required");
  std::set<std::string> tags;
  for (const auto& m : models)
    if (!tags.insert(m.tag).second) throw SchemaError("models", "duplicate tag '" + m.tag + "'");
  if (reference_multiplier == 0) throw SchemaError("reference_multiplier", "must be positive");
  if (sgd_reference_factor == 0) throw SchemaError("sgd_reference_factor", "must be positive");
  if (!(tikhonov >= 0.0)) throw SchemaError("tikhonov", "must be nonnegative");
  const auto nu = target_measure();
  if (nu.dim() != sampler.dim) throw SchemaError("measure", "dimension differs from the sampler's");
  for (std::size_t k = 0; k < models.size(); ++k)
    if (models[k].model) model_from_json(*models[k].model, nu.size(), "models[" + std::to_string(k) + "].model");
}

DiscreteMeasure ExperimentConfig::target_measure() const {
  if (const auto* m = std::get_if<DiscreteMeasure>(&measure)) return *m;
  const auto& r = std::get<RandomAtoms>(measure);
  if (r.count == 0 || r.dim == 0) throw SchemaError("measure.random_atoms", "count and dim must be positive");
  if (!(r.high > r.low)) throw SchemaError("measure.random_atoms", "high must exceed low");
  auto pts = draw(SamplerSpec::hypercube(r.dim, r.seed), r.count);
  std::vector<double> flat = pts.flat();
  for (double& v : flat) v = r.low + (r.high - r.low) * v;
  return DiscreteMeasure::uniform(PointSet(r.dim, std::move(flat)));
}

Json to_json(const ExperimentConfig& c) {
  Json j;
  j["schema_version"] = c.schema_version;
  j["sampler"] = to_json(c.sampler);
  if (const auto* m = std::get_if<DiscreteMeasure>(&c.measure)) {
    j["measure"] = to_json(*m);
  } else {
    const auto& r = std::get<RandomAtoms>(c.measure);
    j["measure"] = Json{{"random_atoms", {{"count", r.count}, {"dim", r.dim}, {"low", r.low}, {"high", r.high}, {"seed", r.seed}}}};
  }
  j["cost"] = to_json(c.cost);
  Json models = Json::array();
  for (const auto& m : c.models) {
    Json e{{"tag", m.tag}, {"model", m.model ? *m.model : Json(nullptr)}, {"eps_bar", m.eps_bar}};
    if (m.rule) e["rule"] = to_string(*m.rule);
    if (m.concordance) e["M"] = *m.concordance;
    models.push_back(e);
  }
  j["models"] = models;
  j["T_grid"] = c.T_grid;
  j["seeds"] = c.seeds;
  j["reference_multiplier"] = c.reference_multiplier;
  j["sgd_reference_factor"] = c.sgd_reference_factor;
  j["tikhonov"] = c.tikhonov;
  j["output_dir"] = c.output_dir;
  return j;
}

namespace {

std::size_t positive_count(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = require_field(j, key, path);
  if (!v.is_number_unsigned() || v.get<std::size_t>() == 0) throw SchemaError(path + "." + key, "expected a positive integer");
  return v.get<std::size_t>();
}

}  // namespace

ExperimentConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("<root>", "expected an object");
  ExperimentConfig c;
  const Json& ver = require_field(j, "schema_version", "config");
  if (!ver.is_number_integer()) throw SchemaError("schema_version", "expected an integer");
  c.schema_version = ver.get<int>();
  if (c.schema_version != kConfigSchemaVersion)
    throw SchemaError("schema_version", "unsupported version " + std::to_string(c.schema_version));
  c.sampler = sampler_from_json(require_field(j, "sampler", "config"), "sampler");

  const Json& meas = require_field(j, "measure", "config");
  if (meas.is_object() && meas.contains("random_atoms")) {
    const Json& r = meas["random_atoms"];
    const std::string p = "measure.random_atoms";
    RandomAtoms ra;
    ra.count = positive_count(r, "count", p);
    ra.dim = positive_count(r, "dim", p);
    if (r.contains("low")) ra.low = require_number(r, "low", p);
    if (r.contains("high")) ra.high = require_number(r, "high", p);
    if (r.contains("seed")) {
      if (!r["seed"].is_number_unsigned()) throw SchemaError(p + ".seed", "expected a nonnegative integer");
      ra.seed = r["seed"].get<std::uint64_t>();
    }
    c.measure = ra;
  } else {
    c.measure = measure_from_json(meas, "measure");
  }
  c.cost = cost_from_json(require_field(j, "cost", "config"), "cost");

  const Json& models = require_field(j, "models", "config");
  if (!models.is_array()) throw SchemaError("models", "expected an array");
  for (std::size_t k = 0; k < models.size(); ++k) {
    const std::string p = "models[" + std::to_string(k) + "]";
    const Json& e = models[k];
    ModelEntry m;
    const Json& tag = require_field(e, "tag", p);
    if (!tag.is_string() || tag.get<std::string>().empty()) throw SchemaError(p + ".tag", "expected a nonempty string");
    m.tag = tag.get<std::string>();
    if (e.contains("model") && !e["model"].is_null() && !(e["model"].is_string() && e["model"] == "none")) {
      if (!e["model"].is_object()) throw SchemaError(p + ".model", "expected an object, null or \"none\"");
      m.model = e["model"];
    }
    if (e.contains("rule")) {
      if (!e["rule"].is_string()) throw SchemaError(p + ".rule", "expected a string");
      try {
        m.rule = rate_rule_from_string(e["rule"].get<std::string>());
      } catch (const std::invalid_argument& ex) {
        throw SchemaError(p + ".rule", ex.what());
      }
    }
    if (e.contains("M")) m.concordance = require_number(e, "M", p);
    if (e.contains("eps_bar")) m.eps_bar = require_number(e, "eps_bar", p);
    c.models.push_back(std::move(m));
  }

  const Json& tg = require_field(j, "T_grid", "config");
  if (!tg.is_array()) throw SchemaError("T_grid", "expected an array of positive integers");
  for (const auto& v : tg) {
    if (!v.is_number_unsigned()) throw SchemaError("T_grid", "expected positive integers");
    c.T_grid.push_back(v.get<std::size_t>());
  }
  const Json& sd = require_field(j, "seeds", "config");
  if (!sd.is_array()) throw SchemaError("seeds", "expected an array of nonnegative integers");
  for (const auto& v : sd) {
    if (!v.is_number_unsigned()) throw SchemaError("seeds", "expected nonnegative integers");
    c.seeds.push_back(v.get<std::uint64_t>());
  }
  if (j.contains("reference_multiplier")) c.reference_multiplier = positive_count(j, "reference_multiplier", "config");
  if (j.contains("sgd_reference_factor")) c.sgd_reference_factor = positive_count(j, "sgd_reference_factor", "config");
  if (j.contains("tikhonov")) c.tikhonov = require_number(j, "tikhonov", "config");
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string()) throw SchemaError("output_dir", "expected a string");
    c.output_dir = j["output_dir"].get<std::string>();
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SchemaError("<root>", std::string("invalid JSON: ") + e.what());
  }
  return config_from_json(j);
}

ExperimentConfig default_convergence_config() {
  ExperimentConfig c;
  c.sampler = SamplerSpec::gaussian(2, 20231);
  c.measure = RandomAtoms{10, 2, -1.0, 1.0, 7};
  c.cost = CostSpec::sup_norm();
  c.models = {
      ModelEntry{"unregularized", std::nullopt, std::nullopt, std::nullopt, 0.0},
      ModelEntry{"entropic", Json{{"kind", "exponential"}, {"lambda", 0.1}}, std::nullopt, std::nullopt, 0.0},
      ModelEntry{"chi2", Json{{"kind", "uniform"}, {"lambda", 0.1}}, std::nullopt, std::nullopt, 0.0},
  };
  c.T_grid = {100, 316, 1000, 3162, 10000};
  c.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  return c;
}

RateRule effective_rule(const ModelEntry& e, const std::optional<MarginalModel>& model) {
  if (e.rule) return *e.rule;
  if (model && model->lipschitz()) return RateRule::smooth;
  return RateRule::lipschitz;
}

bool evaluates_lower_average(RateRule rule) { return rule != RateRule::smooth; }

}  // namespace sdot
