#include "sdot/io/json_io.hpp"

namespace sdot {

const Json& require_field(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(path + "." + key, "missing");
  return *it;
}

double require_number(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = require_field(j, key, path);
  if (!v.is_number()) throw SchemaError(path + "." + key, "expected a number");
  return v.get<double>();
}

std::vector<double> number_array(const Json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number()) throw SchemaError(path + "[" + std::to_string(k) + "]", "expected a number");
    out.push_back(j[k].get<double>());
  }
  return out;
}

namespace {

std::string require_string(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = require_field(j, key, path);
  if (!v.is_string()) throw SchemaError(path + "." + key, "expected a string");
  return v.get<std::string>();
}

std::uint64_t require_seed(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = require_field(j, key, path);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
    throw SchemaError(path + "." + key, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

// Converts library validation failures into schema errors for `path`.
template <class F>
auto wrap(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const SchemaError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw SchemaError(path, e.what());
  }
}

}  // namespace

Json to_json(const PointSet& p) {
  Json rows = Json::array();
  for (std::size_t j = 0; j < p.size(); ++j) rows.push_back(std::vector<double>(p[j].begin(), p[j].end()));
  return rows;
}

PointSet point_set_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw SchemaError(path, "expected a nonempty array of points");
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < j.size(); ++k) rows.push_back(number_array(j[k], path + "[" + std::to_string(k) + "]"));
  return wrap(path, [&] { return PointSet(rows); });
}

Json to_json(const DiscreteMeasure& m) {
  return Json{{"atoms", to_json(m.atoms())},
              {"weights", std::vector<double>(m.weights().begin(), m.weights().end())}};
}

DiscreteMeasure measure_from_json(const Json& j, const std::string& path) {
  auto atoms = point_set_from_json(require_field(j, "atoms", path), path + ".atoms");
  if (!j.contains("weights")) return DiscreteMeasure::uniform(std::move(atoms));
  auto w = number_array(j["weights"], path + ".weights");
  return wrap(path + ".weights", [&] { return DiscreteMeasure(std::move(atoms), std::move(w)); });
}

Json to_json(const CostSpec& c) {
  if (c.kind == CostKind::sup_norm) return Json{{"kind", "supnorm"}};
  return Json{{"kind", "pnorm"}, {"p", c.p}};
}

CostSpec cost_from_json(const Json& j, const std::string& path) {
  const auto kind = require_string(j, "kind", path);
  if (kind == "supnorm") return CostSpec::sup_norm();
  if (kind == "pnorm") {
    const double p = require_number(j, "p", path);
    return wrap(path + ".p", [&] { return CostSpec::pnorm(p); });
  }
  throw SchemaError(path + ".kind", "expected 'pnorm' or 'supnorm'");
}

Json to_json(const SamplerSpec& s) {
  switch (s.kind) {
    case SamplerKind::gaussian: return Json{{"kind", "gaussian"}, {"dim", s.dim}, {"seed", s.seed}};
    case SamplerKind::hypercube: return Json{{"kind", "hypercube"}, {"dim", s.dim}, {"seed", s.seed}};
    case SamplerKind::empirical:
      return Json{{"kind", "empirical"}, {"atoms", to_json(s.points)}, {"weights", s.weights}, {"seed", s.seed}};
  }
  return {};
}

SamplerSpec sampler_from_json(const Json& j, const std::string& path) {
  const auto kind = require_string(j, "kind", path);
  const std::uint64_t seed = j.contains("seed") ? require_seed(j, "seed", path) : 0;
  if (kind == "gaussian" || kind == "hypercube") {
    const Json& d = require_field(j, "dim", path);
    if (!d.is_number_unsigned() || d.get<std::size_t>() == 0) throw SchemaError(path + ".dim", "expected a positive integer");
    return kind == "gaussian" ? SamplerSpec::gaussian(d.get<std::size_t>(), seed)
                              : SamplerSpec::hypercube(d.get<std::size_t>(), seed);
  }
  if (kind == "empirical") return SamplerSpec::empirical(measure_from_json(j, path), seed);
  throw SchemaError(path + ".kind", "expected 'gaussian', 'hypercube' or 'empirical'");
}

Json to_json(const MarginalModel& m) {
  Json j{{"kind", to_string(m.kind())}, {"lambda", m.lambda()}, {"eta", m.eta()}};
  if (m.kind() == ModelKind::pareto) j["q"] = m.q();
  return j;
}

MarginalModel model_from_json(const Json& j, std::optional<std::size_t> n, const std::string& path) {
  const auto kind_name = require_string(j, "kind", path);
  ModelKind kind;
  try {
    kind = model_kind_from_string(kind_name);
  } catch (const std::invalid_argument&) {
    throw SchemaError(path + ".kind", "unknown model kind '" + kind_name + "'");
  }
  const double lambda = require_number(j, "lambda", path);
  const double q = kind == ModelKind::pareto ? require_number(j, "q", path) : 0.0;
  std::vector<double> eta;
  if (!j.contains("eta") || (j["eta"].is_string() && j["eta"] == "uniform")) {
    if (!n) throw SchemaError(path + ".eta", "missing and the number of atoms is unknown");
    eta = MarginalModel::uniform_weights(*n);
  } else {
    eta = number_array(j["eta"], path + ".eta");
    if (n && eta.size() != *n) throw SchemaError(path + ".eta", "length does not match the number of atoms");
  }
  return wrap(path, [&] { return MarginalModel(kind, lambda, std::move(eta), q); });
}

Json to_json(const KnapsackInstance& k) { return Json{{"w", k.w}, {"b", k.b}, {"p", k.p}}; }

KnapsackInstance knapsack_from_json(const Json& j, const std::string& path) {
  KnapsackInstance k;
  k.w = number_array(require_field(j, "w", path), path + ".w");
  k.b = require_number(j, "b", path);
  if (j.contains("p")) k.p = require_number(j, "p", path);
  wrap(path, [&] {
    k.validate();
    return 0;
  });
  return k;
}

Json to_json(const QuadratureSpec& q) {
  if (q.kind == QuadratureKind::grid) return Json{{"kind", "grid"}, {"m", q.resolution}};
  return Json{{"kind", "monte_carlo"}, {"n", q.resolution}, {"seed", q.seed}};
}

QuadratureSpec quadrature_from_json(const Json& j, const std::string& path) {
  const auto kind = require_string(j, "kind", path);
  auto count = [&](const std::string& key) {
    const Json& v = require_field(j, key, path);
    if (!v.is_number_unsigned() || v.get<std::size_t>() == 0) throw SchemaError(path + "." + key, "expected a positive integer");
    return v.get<std::size_t>();
  };
  if (kind == "grid") return QuadratureSpec::grid(count("m"));
  if (kind == "monte_carlo") return QuadratureSpec::monte_carlo(count("n"), j.contains("seed") ? require_seed(j, "seed", path) : 0);
  throw SchemaError(path + ".kind", "expected 'grid' or 'monte_carlo'");
}

}  // namespace sdot
