#pragma once

#include <string>
#include <vector>

#include "sdot/experiment/runner.hpp"

namespace sdot {

enum class Metric { subopt, potgap };
std::string to_string(Metric m);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;  // of log10(mean) against log10(T)
  double r2 = 0.0;
  std::vector<std::size_t> T;       // horizons used in the fit
  std::vector<double> means;        // per-T mean over seeds
  std::vector<std::string> warnings;
};

// Least-squares fit of log10(y) on log10(x).
SlopeFit fit_power_law(const std::vector<std::size_t>& x, const std::vector<double>& y);

// Averages the metric over seeds at each T and fits a power law. Horizons
// with a nonpositive mean are dropped with a warning; at least three must
// remain.
SlopeFit fit_slope(const std::vector<ConvergenceRecord>& records, const std::string& model, Metric metric);

// Per-T means of the metric for one model, in increasing T.
std::vector<std::pair<std::size_t, double>> metric_means(const std::vector<ConvergenceRecord>& records,
                                                         const std::string& model, Metric metric);

}  // namespace sdot
