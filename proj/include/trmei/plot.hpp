#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace trmei {

struct CurveSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> se;
};

// Reads a curves/<problem>_<method>.csv file; '#' lines are skipped.
CurveSeries read_curve_csv(const std::filesystem::path& path);

struct SvgPlot {
  std::string svg;
  int dropped_points = 0;  // nonpositive values removed under log_y
};

// Mean line with a +-1 SE band per series. Output is a pure function of the input.
SvgPlot render_convergence_svg(const std::string& title, const std::vector<CurveSeries>& series,
                               bool log_y, const nlohmann::json& metadata = nullptr);

struct PlotOutcome {
  std::vector<std::filesystem::path> written;
  int dropped_points = 0;
};

// Groups curve files by problem (file stem "<problem>_<method>") and writes
// <out_dir>/<problem>.svg for each. Throws InputError listing absent inputs.
PlotOutcome plot_curve_files(const std::vector<std::filesystem::path>& inputs,
                             const std::filesystem::path& out_dir, bool log_y);

}  // namespace trmei
