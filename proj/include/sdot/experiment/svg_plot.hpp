#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sdot/experiment/runner.hpp"
#include "sdot/experiment/slope.hpp"

namespace sdot {

// Log-log panel of the per-T seed mean of one metric, one series per model
// in order of first appearance. Nullopt when no series has a positive point.
std::optional<std::string> render_panel_svg(const std::vector<ConvergenceRecord>& records, Metric metric);

struct PlotOutput {
  std::vector<std::string> written;  // file paths
  std::vector<std::string> notices;  // omitted panels
};

// Writes subopt.svg and potgap.svg into dir.
PlotOutput emit_plots(const std::vector<ConvergenceRecord>& records, const std::string& dir);

// Decade tick exponents covering [lo, hi] (lo, hi > 0), strictly increasing.
std::vector<int> decade_ticks(double lo, double hi);

}  // namespace sdot
