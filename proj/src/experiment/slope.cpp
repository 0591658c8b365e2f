#include "sdot/experiment/slope.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace sdot {

std::string to_string(Metric m) { return m == Metric::subopt ? "subopt" : "potgap"; }

std::vector<std::pair<std::size_t, double>> metric_means(const std::vector<ConvergenceRecord>& records,
                                                         const std::string& model, Metric metric) {
  std::map<std::size_t, std::pair<double, std::size_t>> acc;
  for (const auto& r : records) {
    if (r.model != model) continue;
    auto& a = acc[r.T];
    a.first += metric == Metric::subopt ? r.subopt : r.potgap;
    ++a.second;
  }
  std::vector<std::pair<std::size_t, double>> out;
  for (const auto& [T, a] : acc) out.emplace_back(T, a.first / static_cast<double>(a.second));
  return out;
}

SlopeFit fit_power_law(const std::vector<std::size_t>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_power_law: size mismatch");
  if (x.size() < 2) throw std::invalid_argument("fit_power_law: need at least two points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] == 0 || !(y[k] > 0.0)) throw std::invalid_argument("fit_power_law: values must be positive");
    lx[k] = std::log10(static_cast<double>(x[k]));
    ly[k] = std::log10(y[k]);
    sx += lx[k];
    sy += ly[k];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
    syy += (ly[k] - my) * (ly[k] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_power_law: x values must differ");
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  f.T = x;
  f.means = y;
  return f;
}

SlopeFit fit_slope(const std::vector<ConvergenceRecord>& records, const std::string& model, Metric metric) {
  std::vector<std::size_t> xs;
  std::vector<double> ys;
  std::vector<std::string> warnings;
  for (const auto& [T, m] : metric_means(records, model, metric)) {
    if (m > 0.0 && std::isfinite(m)) {
      xs.push_back(T);
      ys.push_back(m);
    } else {
      warnings.push_back(model + ": dropped T=" + std::to_string(T) + " with nonpositive mean " + to_string(metric));
    }
  }
  if (xs.size() < 3)
    throw std::invalid_argument("fit_slope: model '" + model + "' has fewer than three usable horizons for " +
                                to_string(metric));
  SlopeFit f = fit_power_law(xs, ys);
  f.warnings = std::move(warnings);
  return f;
}

}  // namespace sdot
