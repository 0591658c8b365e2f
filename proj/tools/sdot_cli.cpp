// Command-line front end: JSON in, JSON or CSV out.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sdot/core/c_transform.hpp"
#include "sdot/experiment/config.hpp"
#include "sdot/experiment/runner.hpp"
#include "sdot/experiment/slope.hpp"
#include "sdot/experiment/svg_plot.hpp"
#include "sdot/hardness/knapsack.hpp"
#include "sdot/io/json_io.hpp"
#include "sdot/noise/choice.hpp"
#include "sdot/noise/smooth_transform.hpp"
#include "sdot/solver/averaged_sgd.hpp"
#include "sdot/solver/reference.hpp"

using namespace sdot;

namespace {

struct Io {
  std::string input = "-";
  std::string out;
};

Json read_json(const std::string& path) {
  try {
    if (path == "-") return Json::parse(std::cin);
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SchemaError("<root>", std::string("invalid JSON: ") + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::optional<MarginalModel> optional_model(const Json& j, std::size_t n) {
  if (!j.contains("model") || j["model"].is_null() || j["model"] == "none") return std::nullopt;
  return model_from_json(j["model"], n, "model");
}

std::vector<double> vec_field(const Json& j, const std::string& key) {
  return number_array(require_field(j, key, "input"), key);
}

void add_io(CLI::App* cmd, Io& io) {
  cmd->add_option("-i,--input", io.input, "input JSON file, - for stdin")->capture_default_str();
  cmd->add_option("-o,--out", io.out, "output file (default stdout)");
}

// {"model": {...}, "u": [...]}
void cmd_probs(const Io& io, double eps) {
  const Json j = read_json(io.input);
  const auto u = vec_field(j, "u");
  const auto model = model_from_json(require_field(j, "model", "input"), u.size(), "model");
  const auto cp = choice_probabilities_from_utilities(u, model, eps);
  Json out{{"p", cp.p}, {"method", to_string(cp.method)}, {"tau", cp.tau}, {"iterations", cp.iterations}, {"eps", cp.eps}};
  write_text(io.out, out.dump(2) + "\n");
}

// {"measure", "cost", "phi", "x", "model"?}
void cmd_transform(const Io& io, double eps) {
  const Json j = read_json(io.input);
  const auto nu = measure_from_json(require_field(j, "measure", "input"));
  const auto cost = cost_from_json(require_field(j, "cost", "input"));
  const auto phi = vec_field(j, "phi");
  const auto x = vec_field(j, "x");
  if (phi.size() != nu.size()) throw SchemaError("phi", "length does not match the number of atoms");
  if (x.size() != nu.dim()) throw SchemaError("x", "length does not match the dimension");
  const auto hard = discrete_c_transform(phi, x, nu, cost);
  Json out{{"hard", {{"value", hard.value}, {"winner", hard.winner}}}};
  if (const auto model = optional_model(j, nu.size())) {
    const auto u = utilities(phi, x, nu, cost);
    const auto sm = smooth_max(u, *model, eps);
    out["smooth"] = {{"value", sm.value}, {"p", sm.probs.p}, {"method", to_string(sm.probs.method)}};
  }
  write_text(io.out, out.dump(2) + "\n");
}

// {"sampler", "measure", "cost", "model"?, "T", "rule"?, "eps_bar"?, "tikhonov"?, "M"?}
void cmd_solve(const Io& io, std::optional<std::uint64_t> seed, std::optional<double> eps, bool timing,
               const std::string& summary) {
  const Json j = read_json(io.input);
  auto sampler = sampler_from_json(require_field(j, "sampler", "input"));
  if (seed) sampler.seed = *seed;
  const auto nu = measure_from_json(require_field(j, "measure", "input"));
  const auto cost = cost_from_json(require_field(j, "cost", "input"));
  const auto model = optional_model(j, nu.size());
  const Json& Tj = require_field(j, "T", "input");
  if (!Tj.is_number_unsigned() || Tj.get<std::size_t>() == 0) throw SchemaError("T", "expected a positive integer");

  ModelEntry entry;
  if (j.contains("rule")) {
    try {
      entry.rule = rate_rule_from_string(j["rule"].get<std::string>());
    } catch (const std::exception& e) {
      throw SchemaError("rule", e.what());
    }
  }
  SolverConfig sc;
  sc.T = Tj.get<std::size_t>();
  sc.rule = effective_rule(entry, model);
  sc.eps_bar = eps.value_or(j.contains("eps_bar") ? require_number(j, "eps_bar", "input") : 0.1);
  if (!model || model->has_closed_form()) sc.eps_bar = 0.0;
  sc.tikhonov = j.contains("tikhonov") ? require_number(j, "tikhonov", "input") : 0.0;
  sc.constants.eps_bar = sc.eps_bar;
  if (model) sc.constants.L = model->lipschitz();
  if (j.contains("M")) sc.constants.M = require_number(j, "M", "input");
  sc.timing = timing;

  const auto res = averaged_sgd(sampler, nu, cost, model, sc);
  write_text(io.out, res.trace.to_csv());
  if (!summary.empty()) {
    Json s{{"lower", res.lower}, {"upper", res.upper}, {"gamma", res.trace.gamma}, {"rule", to_string(sc.rule)},
           {"samples_used", res.trace.samples_used}};
    write_text(summary, s.dump(2) + "\n");
  }
}

// {"instance": {...}, "quadrature": {...}, "delta"?}
void cmd_volume(const Io& io, std::optional<double> tol) {
  const Json j = read_json(io.input);
  const auto inst = knapsack_from_json(require_field(j, "instance", "input"));
  const auto quad = j.contains("quadrature") ? quadrature_from_json(j["quadrature"]) : QuadratureSpec::grid(400);
  const double delta = tol.value_or(j.contains("delta") ? require_number(j, "delta", "input") : 1e-3);
  const auto r = knapsack_volume_via_ot(inst, delta, quad);
  std::string csv = "d,b,t_hat,exact,oracle_calls,delta,quadrature\n";
  csv += std::to_string(inst.dim()) + "," + fmt(inst.b) + "," + fmt(r.t_hat) + "," + (r.exact ? fmt(*r.exact) : "") +
         "," + std::to_string(r.oracle_calls) + "," + fmt(delta) + "," + quad.describe() + "\n";
  write_text(io.out, csv);
}

// {"measure", "cost", "model"?, "samples": [[...]] | "sampler" + "n", "T"?, "eps_bar"?}
void cmd_reference(const Io& io, std::optional<std::uint64_t> seed, std::optional<double> tol) {
  const Json j = read_json(io.input);
  const auto nu = measure_from_json(require_field(j, "measure", "input"));
  const auto cost = cost_from_json(require_field(j, "cost", "input"));
  const auto model = optional_model(j, nu.size());
  PointSet samples;
  if (j.contains("samples")) {
    samples = point_set_from_json(j["samples"], "samples");
  } else {
    auto sampler = sampler_from_json(require_field(j, "sampler", "input"));
    if (seed) sampler.seed = *seed;
    const Json& n = require_field(j, "n", "input");
    if (!n.is_number_unsigned() || n.get<std::size_t>() == 0) throw SchemaError("n", "expected a positive integer");
    samples = draw(sampler, n.get<std::size_t>());
  }
  if (samples.dim() != nu.dim()) throw SchemaError("samples", "dimension differs from the measure's");
  const auto costs = CostMatrix::build(samples, nu, cost);
  ReferenceOptions ro;
  ro.T = j.contains("T") ? j["T"].get<std::size_t>() : std::max<std::size_t>(1, samples.size() / 10);
  if (j.contains("eps_bar")) ro.eps_bar = require_number(j, "eps_bar", "input");
  if (tol) ro.grad_tol = *tol;
  ro.shuffle_seed = seed.value_or(0);
  const auto r = finite_sample_reference(nu, costs, model, ro);
  Json out{{"value", r.value}, {"phi", r.phi}, {"method", to_string(r.method)}, {"residual", r.residual},
           {"iterations", r.iterations}};
  write_text(io.out, out.dump(2) + "\n");
}

Json fits_json(const std::vector<ConvergenceRecord>& recs, const std::vector<std::string>& models) {
  Json fits = Json::array();
  for (const auto& m : models) {
    for (Metric metric : {Metric::subopt, Metric::potgap}) {
      Json f{{"model", m}, {"metric", to_string(metric)}};
      try {
        const auto fit = fit_slope(recs, m, metric);
        f["slope"] = fit.slope;
        f["r2"] = fit.r2;
        f["warnings"] = fit.warnings;
      } catch (const std::invalid_argument& e) {
        f["error"] = e.what();
      }
      fits.push_back(f);
    }
  }
  return fits;
}

std::vector<std::string> model_order(const std::vector<ConvergenceRecord>& recs) {
  std::vector<std::string> out;
  for (const auto& r : recs)
    if (std::find(out.begin(), out.end(), r.model) == out.end()) out.push_back(r.model);
  return out;
}

void report(const std::vector<ConvergenceRecord>& recs, const std::string& dir) {
  const Json fits = fits_json(recs, model_order(recs));
  write_text(dir + "/fits.json", fits.dump(2) + "\n");
  for (const auto& f : fits) {
    if (f.contains("slope"))
      std::cerr << f["model"].get<std::string>() << " " << f["metric"].get<std::string>() << " slope "
                << f["slope"].get<double>() << " r2 " << f["r2"].get<double>() << "\n";
    else
      std::cerr << f["model"].get<std::string>() << " " << f["metric"].get<std::string>() << ": "
                << f["error"].get<std::string>() << "\n";
  }
  const auto plots = emit_plots(recs, dir);
  for (const auto& n : plots.notices) std::cerr << "notice: " << n << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-discrete optimal transport with smoothed c-transforms"};
  app.require_subcommand(1);

  Io io;
  double eps = 1e-10;
  std::optional<double> eps_opt, tol;
  std::optional<std::uint64_t> seed;
  bool timing = false;
  std::string summary;

  auto* probs = app.add_subcommand("probs", "choice probabilities for utilities u");
  add_io(probs, io);
  probs->add_option("--eps", eps, "bisection tolerance")->capture_default_str();

  auto* transform = app.add_subcommand("transform", "hard and smooth c-transform at (phi, x)");
  add_io(transform, io);
  transform->add_option("--eps", eps, "bisection tolerance")->capture_default_str();

  auto* solve = app.add_subcommand("solve", "averaged SGD; writes the trace CSV");
  add_io(solve, io);
  solve->add_option("--seed", seed, "sampler seed override");
  solve->add_option("--eps", eps_opt, "oracle accuracy budget eps_bar");
  solve->add_flag("--timing", timing, "record wall-clock times");
  solve->add_option("--summary", summary, "write final averages as JSON");

  auto* volume = app.add_subcommand("volume", "knapsack volume through two-point transport");
  add_io(volume, io);
  volume->add_option("--tol", tol, "binary search accuracy delta");

  auto* reference = app.add_subcommand("reference", "finite-sample reference optimum");
  add_io(reference, io);
  reference->add_option("--seed", seed, "sampler and shuffle seed");
  reference->add_option("--tol", tol, "gradient-norm tolerance");

  std::string config_path, out_dir;
  std::size_t workers = 1;
  bool resume = false;
  std::optional<std::size_t> max_cells;
  auto* experiment = app.add_subcommand("experiment", "convergence study over a T grid and seeds");
  experiment->add_option("--config", config_path, "experiment config JSON (default: built-in study)");
  experiment->add_option("--out", out_dir, "output directory (overrides the config)");
  experiment->add_option("--workers", workers, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  experiment->add_flag("--resume", resume, "reuse finished cells from the manifest");
  experiment->add_flag("--timing", timing, "record per-cell wall time in ms");
  experiment->add_option("--max-cells", max_cells, "stop after this many new cells");
  bool dump_default = false;
  experiment->add_flag("--print-default-config", dump_default, "print the built-in config and exit");

  std::string results_path;
  auto* plot = app.add_subcommand("plot", "slope fits and SVG panels from a results CSV");
  plot->add_option("--results", results_path, "results.csv")->required();
  plot->add_option("--out", out_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*probs) cmd_probs(io, eps);
    if (*transform) cmd_transform(io, eps);
    if (*solve) cmd_solve(io, seed, eps_opt, timing, summary);
    if (*volume) cmd_volume(io, tol);
    if (*reference) cmd_reference(io, seed, tol);
    if (*experiment) {
      ExperimentConfig cfg = config_path.empty() ? default_convergence_config() : load_config(config_path);
      if (dump_default) {
        std::cout << to_json(cfg).dump(2) << "\n";
        return 0;
      }
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      RunOptions ro;
      ro.workers = workers;
      ro.resume = resume;
      ro.timing = timing;
      ro.max_new_cells = max_cells;
      ro.log = &std::cerr;
      const auto outcome = run_convergence_experiment(cfg, cfg.output_dir, ro);
      std::cerr << "computed " << outcome.computed << " cells, reused " << outcome.reused << "\n";
      if (outcome.complete)
        report(outcome.records, cfg.output_dir);
      else
        std::cerr << "grid incomplete; rerun with --resume\n";
    }
    if (*plot) report(read_results_csv(results_path), out_dir);
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
