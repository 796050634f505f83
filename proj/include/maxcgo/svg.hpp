#pragma once

#include <string>
#include <vector>

namespace maxcgo {

struct PlotSeries {
  std::string name;
  std::vector<double> x, y;
  bool line = false;  // polyline instead of markers
  std::string color = "#1f77b4";
};

struct PlotSpec {
  std::string title, x_label, y_label;
  bool log_x = false, log_y = false;
  int width = 640, height = 420;
};

// Scatter/polyline chart with axes, ticks and a legend. Non-finite points
// (or non-positive ones on a log axis) are skipped.
std::string render_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series);

}  // namespace maxcgo
