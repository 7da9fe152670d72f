#pragma once

#include <string>
#include <vector>

namespace pvf {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Static SVG line chart; `log_x` plots x on a log10 axis.
std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<Series>& series, bool log_x);

struct BarGroup {
  std::string label;
  std::vector<double> values;  // one per segment label
};

/// Static SVG grouped bar chart.
std::string bar_chart_svg(const std::string& title, const std::string& y_label,
                          const std::vector<std::string>& segment_labels,
                          const std::vector<BarGroup>& groups);

}  // namespace pvf
