#include "trmei/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "trmei/common.hpp"

namespace trmei {

namespace fs = std::filesystem;

CurveSeries read_curve_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  CurveSeries series;
  series.label = path.stem().string();
  std::string line;
  bool header_seen = false;
  int col_x = -1, col_mean = -1, col_se = -1;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (!header_seen) {
      for (int i = 0; i < static_cast<int>(cells.size()); ++i) {
        if (cells[i] == "eval_index") col_x = i;
        if (cells[i] == "mean") col_mean = i;
        if (cells[i] == "se") col_se = i;
      }
      if (col_x < 0 || col_mean < 0 || col_se < 0) {
        throw InputError(path.string() + ": missing eval_index/mean/se columns");
      }
      header_seen = true;
      continue;
    }
    const int need = std::max({col_x, col_mean, col_se});
    if (static_cast<int>(cells.size()) <= need) throw InputError(path.string() + ": short row");
    try {
      series.x.push_back(std::stod(cells[col_x]));
      series.mean.push_back(std::stod(cells[col_mean]));
      series.se.push_back(std::stod(cells[col_se]));
    } catch (const std::exception&) {
      throw InputError(path.string() + ": non-numeric value");
    }
  }
  if (!header_seen) throw InputError(path.string() + ": empty curve file");
  return series;
}

namespace {

constexpr double kWidth = 720, kHeight = 440;
constexpr double kLeft = 70, kRight = 170, kTop = 40, kBottom = 50;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt_coord(double v) { return fmt::format("{:.2f}", v); }

}  // namespace

SvgPlot render_convergence_svg(const std::string& title, const std::vector<CurveSeries>& series,
                               bool log_y, const nlohmann::json& metadata) {
  SvgPlot out;
  auto ty = [log_y](double v) { return log_y ? std::log10(v) : v; };

  // Collect the plotted points per series, dropping log-invalid ones.
  struct Pts {
    std::vector<double> x, y, lo, hi;
  };
  std::vector<Pts> pts(series.size());
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (std::size_t s = 0; s < series.size(); ++s) {
    const CurveSeries& c = series[s];
    for (std::size_t i = 0; i < c.x.size(); ++i) {
      const double m = c.mean[i];
      if (!std::isfinite(m) || (log_y && m <= 0.0)) {
        ++out.dropped_points;
        continue;
      }
      const double se = std::isfinite(c.se[i]) ? c.se[i] : 0.0;
      double lo = m - se;
      if (log_y && lo <= 0.0) lo = m;
      pts[s].x.push_back(c.x[i]);
      pts[s].y.push_back(ty(m));
      pts[s].lo.push_back(ty(lo));
      pts[s].hi.push_back(ty(m + se));
      xmin = std::min(xmin, c.x[i]);
      xmax = std::max(xmax, c.x[i]);
      ymin = std::min(ymin, ty(lo));
      ymax = std::max(ymax, ty(m + se));
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * plot_w; };
  auto py = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * plot_h; };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n",
      kWidth, kHeight, kWidth, kHeight);
  if (!metadata.is_null()) svg += "<metadata>" + escape(metadata.dump()) + "</metadata>\n";
  svg += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", kWidth, kHeight);
  svg += fmt::format("<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                     fmt_coord(kLeft + plot_w / 2), escape(title));

  // Axes and ticks.
  svg += fmt::format(
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
      kLeft, kTop, plot_w, plot_h);
  for (int k = 0; k <= 5; ++k) {
    const double xv = xmin + (xmax - xmin) * k / 5.0;
    const double yv = ymin + (ymax - ymin) * k / 5.0;
    svg += fmt::format(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>"
        "<text x=\"{0}\" y=\"{3}\" text-anchor=\"middle\">{4}</text>\n",
        fmt_coord(px(xv)), fmt_coord(kTop + plot_h), fmt_coord(kTop + plot_h + 5),
        fmt_coord(kTop + plot_h + 19), fmt::format("{:.0f}", xv));
    const std::string label = log_y ? fmt::format("1e{:.1f}", yv) : fmt::format("{:.3g}", yv);
    svg += fmt::format(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>"
        "<text x=\"{3}\" y=\"{4}\" text-anchor=\"end\">{5}</text>\n",
        fmt_coord(kLeft - 5), fmt_coord(py(yv)), fmt_coord(kLeft), fmt_coord(kLeft - 8),
        fmt_coord(py(yv) + 4), label);
  }
  svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">evaluations</text>\n",
                     fmt_coord(kLeft + plot_w / 2), fmt_coord(kHeight - 10));
  svg += fmt::format(
      "<text x=\"16\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {0})\">"
      "feasible best{1}</text>\n",
      fmt_coord(kTop + plot_h / 2), log_y ? " (log10)" : "");

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* colour = kPalette[s % std::size(kPalette)];
    const Pts& p = pts[s];
    svg += fmt::format("<g id=\"series-{}\">\n", escape(series[s].label));
    if (!p.x.empty()) {
      std::string band, line;
      for (std::size_t i = 0; i < p.x.size(); ++i) {
        band += fmt::format("{},{} ", fmt_coord(px(p.x[i])), fmt_coord(py(p.hi[i])));
        line += fmt::format("{},{} ", fmt_coord(px(p.x[i])), fmt_coord(py(p.y[i])));
      }
      for (std::size_t i = p.x.size(); i-- > 0;) {
        band += fmt::format("{},{} ", fmt_coord(px(p.x[i])), fmt_coord(py(p.lo[i])));
      }
      band.pop_back();
      line.pop_back();
      svg += fmt::format("<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.2\" stroke=\"none\"/>\n",
                         band, colour);
      svg += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                         line, colour);
    }
    const double ly = kTop + 16 + 20 * static_cast<double>(s);
    svg += fmt::format(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" stroke-width=\"3\"/>"
        "<text x=\"{4}\" y=\"{5}\">{6}</text>\n",
        fmt_coord(kWidth - kRight + 12), fmt_coord(ly), fmt_coord(kWidth - kRight + 36), colour,
        fmt_coord(kWidth - kRight + 42), fmt_coord(ly + 4), escape(series[s].label));
    svg += "</g>\n";
  }
  svg += "</svg>\n";
  out.svg = std::move(svg);
  return out;
}

PlotOutcome plot_curve_files(const std::vector<fs::path>& inputs, const fs::path& out_dir,
                             bool log_y) {
  if (inputs.empty()) throw InputError("no curve files given");
  std::vector<std::string> missing;
  for (const auto& p : inputs) {
    if (!fs::is_regular_file(p)) missing.push_back(p.string());
  }
  if (!missing.empty()) {
    std::string msg = "missing curve files:";
    for (const auto& m : missing) msg += " " + m;
    throw InputError(msg);
  }
  // Problem names never contain '_'; methods may not either, but split at the first one.
  std::map<std::string, std::vector<fs::path>> by_problem;
  for (const auto& p : inputs) {
    const std::string stem = p.stem().string();
    const auto cut = stem.find('_');
    by_problem[cut == std::string::npos ? stem : stem.substr(0, cut)].push_back(p);
  }
  fs::create_directories(out_dir);
  PlotOutcome outcome;
  for (auto& [problem, files] : by_problem) {
    std::sort(files.begin(), files.end());
    std::vector<CurveSeries> series;
    nlohmann::json sources = nlohmann::json::array();
    for (const auto& f : files) {
      CurveSeries c = read_curve_csv(f);
      const auto cut = c.label.find('_');
      if (cut != std::string::npos) c.label = c.label.substr(cut + 1);
      series.push_back(std::move(c));
      sources.push_back(f.filename().string());
    }
    nlohmann::json meta{{"problem", problem}, {"sources", sources}, {"log_y", log_y}};
    {
      // Carry the config echo of the first input.
      std::ifstream in(files.front());
      std::string first;
      std::getline(in, first);
      if (first.rfind("# config=", 0) == 0) {
        meta["config"] = nlohmann::json::parse(first.substr(9), nullptr, false);
      }
    }
    std::string title = problem;
    if (!title.empty()) title[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(title[0])));
    const SvgPlot plot = render_convergence_svg(title, series, log_y, meta);
    const fs::path target = out_dir / (problem + ".svg");
    std::ofstream out(target, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + target.string());
    out << plot.svg;
    outcome.written.push_back(target);
    outcome.dropped_points += plot.dropped_points;
  }
  return outcome;
}

}  // namespace trmei
