#pragma once

#include <optional>
#include <string>
#include <vector>

namespace dshrink::svg {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::optional<double> reference_y;  // dashed horizontal line
  std::optional<double> marker_x;     // dashed vertical line
};

struct BoxGroup {
  std::string name;                        // one x-axis group (e.g. a feature)
  std::vector<std::vector<double>> boxes;  // one sample per legend entry
};

struct BoxPlot {
  std::string title;
  std::string y_label;
  std::vector<std::string> legend;
  std::vector<BoxGroup> groups;
};

/// Self-contained SVG documents; output depends only on the input values.
std::string render(const LineChart& chart);
std::string render(const BoxPlot& plot);

}  // namespace dshrink::svg
