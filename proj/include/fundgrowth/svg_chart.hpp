#pragma once

#include <string>
#include <vector>

namespace fundgrowth {

struct LineSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct LineChart {
  std::string title;
  std::string y_label;
  std::vector<LineSeries> series;
  int width = 800;
  int height = 420;
};

/// Deterministic standalone SVG document: axes with 1-2-5 ticks, legend, one polyline per
/// series. Non-finite points break the line. Long series are reduced to per-pixel min/max.
std::string render_svg(const LineChart& chart);

/// Escapes &, <, >, " for XML text and attributes.
std::string xml_escape(const std::string& s);

}  // namespace fundgrowth
