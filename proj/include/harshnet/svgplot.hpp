#pragma once

#include <string>
#include <vector>

namespace harshnet::svgplot {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color;  // filled from a fixed palette when empty
};

struct ChartSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  int width = 720;
  int height = 440;
  std::vector<Series> series;
};

/// Deterministic standalone SVG line chart; output is a pure function of the
/// spec (no timestamps or generator metadata).
void write_line_chart(const std::string& path, const ChartSpec& spec);

}  // namespace harshnet::svgplot
