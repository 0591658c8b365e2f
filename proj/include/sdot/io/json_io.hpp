#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "sdot/core/cost.hpp"
#include "sdot/core/measure.hpp"
#include "sdot/core/sampler.hpp"
#include "sdot/hardness/knapsack.hpp"
#include "sdot/noise/marginal_model.hpp"

namespace sdot {

using Json = nlohmann::json;

// Schema violation; the message names the offending field path.
class SchemaError : public std::invalid_argument {
 public:
  SchemaError(const std::string& field, const std::string& what)
      : std::invalid_argument("field '" + field + "': " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

const Json& require_field(const Json& j, const std::string& key, const std::string& path);
double require_number(const Json& j, const std::string& key, const std::string& path);
std::vector<double> number_array(const Json& j, const std::string& path);

Json to_json(const PointSet& p);
PointSet point_set_from_json(const Json& j, const std::string& path);

Json to_json(const DiscreteMeasure& m);
DiscreteMeasure measure_from_json(const Json& j, const std::string& path = "measure");

Json to_json(const CostSpec& c);
CostSpec cost_from_json(const Json& j, const std::string& path = "cost");

Json to_json(const SamplerSpec& s);
SamplerSpec sampler_from_json(const Json& j, const std::string& path = "sampler");

Json to_json(const MarginalModel& m);
// "eta" may be omitted or "uniform" when n is known.
MarginalModel model_from_json(const Json& j, std::optional<std::size_t> n = std::nullopt,
                              const std::string& path = "model");

Json to_json(const KnapsackInstance& k);
KnapsackInstance knapsack_from_json(const Json& j, const std::string& path = "instance");

Json to_json(const QuadratureSpec& q);
QuadratureSpec quadrature_from_json(const Json& j, const std::string& path = "quadrature");

}  // namespace sdot
