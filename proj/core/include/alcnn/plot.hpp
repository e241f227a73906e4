#pragma once

#include <string>
#include <vector>

namespace alcnn::plot {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

// Standalone SVG documents: axes, tick labels, one polyline per series or
// one bar per value, and a legend. No scripting, no external styles.
std::string line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<Series>& series);
std::string bar_chart(const std::string& title, const std::string& y_label, const std::vector<std::string>& labels,
                      const std::vector<double>& values);

// Long-format CSV of the plotted series: series,x,y.
std::string series_csv(const std::vector<Series>& series);

}  // namespace alcnn::plot
