#pragma once

#include <string>
#include <utility>
#include <vector>

#include "synthlearn/image.hpp"

namespace synthlearn {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Self-contained SVG line chart. Nonfinite samples break the polyline; on a
// log axis, values <= 0 count as nonfinite for that axis.
struct PlotSpec {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool log_x = false;
  bool log_y = false;
  std::vector<PlotSeries> series;
  std::vector<std::pair<double, double>> markers;  // highlighted (x, y) points
};

void write_svg_plot(const std::string& path, const PlotSpec& spec);

// Packs images (all the same size) into a grid, left to right, top to bottom.
GrayImage montage(const std::vector<GrayImage>& images, std::size_t columns);

}  // namespace synthlearn
