#include "sdot/experiment/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace sdot {

namespace {

constexpr double kWidth = 640, kHeight = 440;
constexpr double kLeft = 80, kRight = 160, kTop = 40, kBottom = 60;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::vector<int> decade_ticks(double lo, double hi) {
  if (!(lo > 0.0) || !(hi >= lo)) throw std::invalid_argument("decade_ticks: need 0 < lo <= hi");
  int a = static_cast<int>(std::floor(std::log10(lo)));
  int b = static_cast<int>(std::ceil(std::log10(hi)));
  if (b <= a) b = a + 1;
  std::vector<int> out;
  for (int k = a; k <= b; ++k) out.push_back(k);
  return out;
}

std::optional<std::string> render_panel_svg(const std::vector<ConvergenceRecord>& records, Metric metric) {
  std::vector<std::string> models;
  for (const auto& r : records)
    if (std::find(models.begin(), models.end(), r.model) == models.end()) models.push_back(r.model);

  struct Series {
    std::string name;
    std::vector<std::pair<double, double>> pts;
  };
  std::vector<Series> series;
  double xlo = std::numeric_limits<double>::infinity(), xhi = 0, ylo = xlo, yhi = 0;
  for (const auto& m : models) {
    Series s{m, {}};
    for (const auto& [T, mean] : metric_means(records, m, metric)) {
      if (!(mean > 0.0) || !std::isfinite(mean)) continue;
      const double x = static_cast<double>(T);
      s.pts.emplace_back(x, mean);
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
      ylo = std::min(ylo, mean);
      yhi = std::max(yhi, mean);
    }
    series.push_back(std::move(s));
  }
  if (!(xhi > 0.0)) return std::nullopt;

  const auto xt = decade_ticks(xlo, xhi);
  const auto yt = decade_ticks(ylo, yhi);
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + pw * (std::log10(x) - xt.front()) / (xt.back() - xt.front()); };
  auto py = [&](double y) { return kTop + ph * (1.0 - (std::log10(y) - yt.front()) / (yt.back() - yt.front())); };

  const std::string title = metric == Metric::subopt ? "Suboptimality" : "Potential gap";
  std::string o;
  o += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(kWidth) + "\" height=\"" +
       num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
  o += "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) + "\" fill=\"white\"/>\n";
  o += "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  o += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" + title +
       " vs T</text>\n";
  o += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k : xt) {
    const double x = px(std::pow(10.0, k));
    o += "<line x1=\"" + num(x) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(x) + "\" y2=\"" + num(kTop + ph) +
         "\" stroke=\"#dddddd\"/>\n";
    o += "<text x=\"" + num(x) + "\" y=\"" + num(kTop + ph + 18) + "\" text-anchor=\"middle\">1e" + std::to_string(k) +
         "</text>\n";
  }
  for (int k : yt) {
    const double y = py(std::pow(10.0, k));
    o += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(y) + "\" x2=\"" + num(kLeft + pw) + "\" y2=\"" + num(y) +
         "\" stroke=\"#dddddd\"/>\n";
    o += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">1e" + std::to_string(k) +
         "</text>\n";
  }
  o += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kHeight - 16) + "\" text-anchor=\"middle\">T</text>\n";
  o += "<text x=\"20\" y=\"" + num(kTop + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " +
       num(kTop + ph / 2) + ")\">" + (metric == Metric::subopt ? "mean suboptimality" : "mean squared gap") +
       "</text>\n";

  std::size_t idx = 0;
  for (const auto& s : series) {
    const std::string color = kPalette[idx % (sizeof kPalette / sizeof kPalette[0])];
    if (!s.pts.empty()) {
      std::string pts;
      for (const auto& [x, y] : s.pts) pts += (pts.empty() ? "" : " ") + num(px(x)) + "," + num(py(y));
      o += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
      for (const auto& [x, y] : s.pts)
        o += "<circle cx=\"" + num(px(x)) + "\" cy=\"" + num(py(y)) + "\" r=\"3\" fill=\"" + color + "\"/>\n";
    }
    const double ly = kTop + 14 + 20 * static_cast<double>(idx);
    const double lx = kLeft + pw + 16;
    o += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(lx + 20) + "\" y2=\"" + num(ly - 4) +
         "\" stroke=\"" + color + "\" stroke-width=\"1.5\"/>\n";
    o += "<text x=\"" + num(lx + 26) + "\" y=\"" + num(ly) + "\">" + escape(s.name) +
         (s.pts.empty() ? " (no positive data)" : "") + "</text>\n";
    ++idx;
  }
  o += "</g>\n</svg>\n";
  return o;
}

PlotOutput emit_plots(const std::vector<ConvergenceRecord>& records, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  PlotOutput out;
  for (Metric m : {Metric::subopt, Metric::potgap}) {
    const auto svg = render_panel_svg(records, m);
    if (!svg) {
      out.notices.push_back(to_string(m) + " panel omitted: no records with a positive mean");
      continue;
    }
    const fs::path path = fs::path(dir) / (to_string(m) + ".svg");
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << *svg;
    out.written.push_back(path.string());
  }
  return out;
}

}  // namespace sdot
