#include "sdot/experiment/runner.hpp"

#include <omp.h>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "sdot/solver/dual_objective.hpp"
#include "sdot/solver/reference.hpp"

namespace sdot {

namespace fs = std::filesystem;

namespace {

using CellKey = std::tuple<std::string, std::size_t, std::uint64_t>;

std::string config_fingerprint(const ExperimentConfig& cfg) {
  Json j = to_json(cfg);
  j.erase("output_dir");
  const std::string s = j.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json record_json(const ConvergenceRecord& r) {
  return Json{{"model", r.model}, {"T", r.T}, {"seed", r.seed}, {"subopt", r.subopt}, {"potgap", r.potgap}, {"ms", r.ms}};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_atomically(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
  }
  fs::rename(tmp, path);
}

// Records from an existing manifest, keyed by cell. Throws when the manifest
// was produced by a different configuration.
std::map<CellKey, ConvergenceRecord> load_manifest(const fs::path& path, const std::string& fingerprint) {
  std::map<CellKey, ConvergenceRecord> done;
  std::ifstream in(path);
  if (!in) return done;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error&) {
      break;  // truncated final line from an interrupted write
    }
    if (header) {
      header = false;
      if (!j.contains("config") || j["config"] != fingerprint)
        throw std::runtime_error("manifest " + path.string() + " belongs to a different configuration");
      continue;
    }
    ConvergenceRecord r;
    r.model = j.at("model").get<std::string>();
    r.T = j.at("T").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.subopt = j.at("subopt").get<double>();
    r.potgap = j.at("potgap").get<double>();
    r.ms = j.at("ms").get<double>();
    done[{r.model, r.T, r.seed}] = r;
  }
  return done;
}

}  // namespace

ConvergenceRecord run_cell(const ExperimentConfig& cfg, const DiscreteMeasure& nu, std::size_t model_index,
                           std::size_t T, std::uint64_t seed, bool timing) {
  const auto start = std::chrono::steady_clock::now();
  const ModelEntry& entry = cfg.models.at(model_index);
  std::optional<MarginalModel> model;
  if (entry.model) model = model_from_json(*entry.model, nu.size(), "model");

  // All models share the draws of a given (T, seed).
  const std::uint64_t stream = derive_seed(derive_seed(cfg.sampler.seed, seed), T);
  const PointSet samples = draw(cfg.sampler.with_seed(stream), cfg.reference_multiplier * T);
  const CostMatrix costs = CostMatrix::build(samples, nu, cfg.cost);

  SolverConfig sc;
  sc.T = T;
  sc.rule = effective_rule(entry, model);
  sc.eps_bar = model ? entry.eps_bar : 0.0;
  if (model && model->has_closed_form()) sc.eps_bar = 0.0;
  sc.tikhonov = model ? 0.0 : cfg.tikhonov;
  sc.constants.eps_bar = sc.eps_bar;
  if (model) sc.constants.L = model->lipschitz();
  sc.constants.M = entry.concordance;
  sc.schedule = LogSchedule::none;
  const SgdResult sgd = averaged_sgd(costs, nu, model, sc);

  ReferenceOptions ro;
  ro.T = T;
  ro.sgd_iterations_factor = cfg.sgd_reference_factor;
  ro.eps_bar = entry.eps_bar;
  ro.shuffle_seed = derive_seed(stream, 1);
  const ReferenceResult ref = finite_sample_reference(nu, costs, model, ro);

  const auto& eval_phi = evaluates_lower_average(sc.rule) ? sgd.lower : sgd.upper;
  const double value =
      dual_objective_estimate(eval_phi, nu.weights(), costs, {}, model ? &*model : nullptr).mean;

  ConvergenceRecord r;
  r.model = entry.tag;
  r.T = T;
  r.seed = seed;
  r.subopt = ref.value - value;
  r.potgap = squared_distance(mean_zero(sgd.upper), ref.phi);
  if (timing)
    r.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string results_csv(const std::vector<ConvergenceRecord>& records) {
  std::string out = "model,T,seed,subopt,potgap,ms\n";
  for (const auto& r : records) {
    out += r.model + "," + std::to_string(r.T) + "," + std::to_string(r.seed) + "," + fmt(r.subopt) + "," +
           fmt(r.potgap) + "," + fmt(r.ms) + "\n";
  }
  return out;
}

std::vector<ConvergenceRecord> read_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "model,T,seed,subopt,potgap,ms")
    throw std::runtime_error(path + ": unexpected header");
  std::vector<ConvergenceRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 6) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 6 fields");
    try {
      out.push_back({f[0], std::stoull(f[1]), std::stoull(f[2]), std::stod(f[3]), std::stod(f[4]), std::stod(f[5])});
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed number");
    }
  }
  return out;
}

ExperimentOutcome run_convergence_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                                             const RunOptions& options) {
  cfg.validate();
  const DiscreteMeasure nu = cfg.target_measure();
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  const fs::path manifest = dir / "manifest.jsonl";
  const fs::path csv = dir / "results.csv";
  const std::string fingerprint = config_fingerprint(cfg);

  std::map<CellKey, ConvergenceRecord> done;
  if (options.resume) done = load_manifest(manifest, fingerprint);

  struct Cell {
    std::size_t model, T;
    std::uint64_t seed;
  };
  std::vector<Cell> all, pending;
  for (std::size_t m = 0; m < cfg.models.size(); ++m)
    for (std::size_t T : cfg.T_grid)
      for (std::uint64_t s : cfg.seeds) {
        all.push_back({m, T, s});
        if (!done.count({cfg.models[m].tag, T, s})) pending.push_back({m, T, s});
      }

  ExperimentOutcome outcome;
  outcome.reused = all.size() - pending.size();

  // Rewrite the manifest so it holds the header plus every reused record;
  // this also drops a torn trailing line.
  {
    std::string text = Json{{"config", fingerprint}, {"schema_version", cfg.schema_version}}.dump() + "\n";
    for (const auto& c : all) {
      auto it = done.find({cfg.models[c.model].tag, c.T, c.seed});
      if (it != done.end()) text += record_json(it->second).dump() + "\n";
    }
    write_atomically(manifest, text);
  }
  std::ofstream mf(manifest, std::ios::app | std::ios::binary);
  if (!mf) throw std::runtime_error("cannot append to " + manifest.string());

  auto canonical = [&] {
    std::vector<ConvergenceRecord> recs;
    for (const auto& c : all) {
      auto it = done.find({cfg.models[c.model].tag, c.T, c.seed});
      if (it != done.end()) recs.push_back(it->second);
    }
    return recs;
  };

  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::size_t computed = 0;
  std::string failure;
  const std::size_t workers = std::max<std::size_t>(1, std::min(options.workers, pending.size()));
  const std::size_t budget = options.max_new_cells.value_or(pending.size());

  auto work = [&] {
    if (workers > 1) omp_set_num_threads(1);
    while (!stop) {
      const std::size_t k = next.fetch_add(1);
      if (k >= pending.size() || k >= budget) return;
      const Cell& c = pending[k];
      const std::string id = cfg.models[c.model].tag + " T=" + std::to_string(c.T) + " seed=" + std::to_string(c.seed);
      try {
        ConvergenceRecord r = run_cell(cfg, nu, c.model, c.T, c.seed, options.timing);
        std::lock_guard<std::mutex> lock(mu);
        mf << record_json(r).dump() << "\n" << std::flush;
        done[{r.model, r.T, r.seed}] = r;
        ++computed;
        write_atomically(csv, results_csv(canonical()));
        if (options.log) *options.log << "done " << id << "\n" << std::flush;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(mu);
        if (failure.empty()) failure = "cell " + id + ": " + e.what();
        stop = true;
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  outcome.records = canonical();
  outcome.computed = computed;
  outcome.complete = outcome.records.size() == all.size();
  write_atomically(csv, results_csv(outcome.records));
  if (!failure.empty()) throw std::runtime_error(failure);
  return outcome;
}

}  // namespace sdot
