#pragma once

#include <string>
#include <vector>

namespace geophase::cli {

enum class Stroke { markers, dashdot, solid };

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;  // NaN entries break the curve
  Stroke stroke = Stroke::solid;
  std::string color = "#1f77b4";
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::vector<double> guides;  // dotted vertical lines
};

/// Row-major values, row 0 at y_min. Cells with valid == false are painted
/// in a fixed dark brown.
struct DensityPlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  int nx = 0;
  int ny = 0;
  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  std::vector<double> values;
  std::vector<bool> valid;
};

std::string render_line_plot(const LinePlot& plot);
std::string render_density_plot(const DensityPlot& plot);

/// 8-bit RGB PNG, rows top to bottom.
std::string encode_png(int width, int height, const std::vector<unsigned char>& rgb);

}  // namespace geophase::cli
