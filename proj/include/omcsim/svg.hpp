#pragma once

#include <span>
#include <string>
#include <vector>

namespace omcsim {

struct PlotSeries {
  std::string label;
  std::span<const double> x;
  std::span<const double> y;
};

// Static SVG line plot: axes with ticks, one polyline per series, legend,
// centered title. Returns the document text.
std::string render_svg_plot(const std::string& title,
                            const std::string& x_label,
                            const std::string& y_label,
                            const std::vector<PlotSeries>& series);

void write_svg_file(const std::string& path, const std::string& svg_text);

}  // namespace omcsim
