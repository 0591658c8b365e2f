#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sdot/experiment/config.hpp"

namespace sdot {

struct ConvergenceRecord {
  std::string model;
  std::size_t T = 0;
  std::uint64_t seed = 0;
  double subopt = 0.0;
  double potgap = 0.0;
  double ms = 0.0;  // 0 unless timing was requested
};

struct RunOptions {
  std::size_t workers = 1;
  bool resume = false;
  bool timing = false;
  // Stop dispatching after this many newly computed cells (an interruption
  // stand-in; a later run with resume finishes the grid).
  std::optional<std::size_t> max_new_cells;
  std::ostream* log = nullptr;
};

struct ExperimentOutcome {
  std::vector<ConvergenceRecord> records;  // canonical order
  std::size_t computed = 0;
  std::size_t reused = 0;
  bool complete = false;
};

// One (model, T, seed) cell: 10T draws, SGD on the first T, reference on all.
ConvergenceRecord run_cell(const ExperimentConfig& cfg, const DiscreteMeasure& nu, std::size_t model_index,
                           std::size_t T, std::uint64_t seed, bool timing);

// Runs every cell of the grid, appending each finished cell to
// <out>/manifest.jsonl and rewriting <out>/results.csv in canonical order.
ExperimentOutcome run_convergence_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                                             const RunOptions& options);

std::string results_csv(const std::vector<ConvergenceRecord>& records);
std::vector<ConvergenceRecord> read_results_csv(const std::string& path);

}  // namespace sdot
