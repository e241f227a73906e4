#include "alcnn/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "alcnn/error.hpp"

namespace alcnn::plot {

namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) throw NumericError("cannot plot a non-finite value");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

std::string header(const std::string& title) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
         "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"11\">\n" +
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n<text x=\"" + num(kWidth / 2) +
         "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + escape(title) + "</text>\n";
}

std::string axes(const Range& y, const std::string& y_label) {
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  std::string s = "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x1) + "\" y2=\"" + num(y0) +
                  "\" stroke=\"black\"/>\n<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x0) +
                  "\" y2=\"" + num(y1) + "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = y.lo + (y.hi - y.lo) * t / 4.0;
    const double py = y0 - (y0 - y1) * t / 4.0;
    s += "<text x=\"" + num(x0 - 6) + "\" y=\"" + num(py + 4) + "\" text-anchor=\"end\">" + tick(v) + "</text>\n";
  }
  s += "<text x=\"16\" y=\"" + num((y0 + y1) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
       num((y0 + y1) / 2) + ")\">" + escape(y_label) + "</text>\n";
  return s;
}

}  // namespace

std::string line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<Series>& series) {
  Range xr, yr;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw InvalidInput("series '" + s.name + "' has mismatched x and y lengths");
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  xr.settle();
  yr.settle();
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  auto px = [&](double v) { return x0 + (x1 - x0) * (v - xr.lo) / (xr.hi - xr.lo); };
  auto py = [&](double v) { return y0 - (y0 - y1) * (v - yr.lo) / (yr.hi - yr.lo); };

  std::string s = header(title) + axes(yr, y_label);
  for (int t = 0; t <= 4; ++t) {
    const double v = xr.lo + (xr.hi - xr.lo) * t / 4.0;
    s += "<text x=\"" + num(px(v)) + "\" y=\"" + num(y0 + 16) + "\" text-anchor=\"middle\">" + tick(v) + "</text>\n";
  }
  s += "<text x=\"" + num((x0 + x1) / 2) + "\" y=\"" + num(kHeight - 12) + "\" text-anchor=\"middle\">" +
       escape(x_label) + "</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* colour = kPalette[i % std::size(kPalette)];
    s += "<polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < series[i].x.size(); ++k)
      s += (k ? " " : "") + num(px(series[i].x[k])) + "," + num(py(series[i].y[k]));
    s += "\"/>\n";
    const double ly = kTop + 14.0 * static_cast<double>(i);
    s += "<line x1=\"" + num(x1 + 10) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(x1 + 28) + "\" y2=\"" + num(ly) +
         "\" stroke=\"" + colour + "\" stroke-width=\"2\"/>\n<text x=\"" + num(x1 + 32) + "\" y=\"" + num(ly + 4) +
         "\">" + escape(series[i].name) + "</text>\n";
  }
  return s + "</svg>\n";
}

std::string bar_chart(const std::string& title, const std::string& y_label, const std::vector<std::string>& labels,
                      const std::vector<double>& values) {
  if (labels.size() != values.size()) throw InvalidInput("bar labels and values differ in count");
  Range yr;
  yr.add(0.0);
  for (double v : values) yr.add(v);
  yr.settle();
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  auto py = [&](double v) { return y0 - (y0 - y1) * (v - yr.lo) / (yr.hi - yr.lo); };
  std::string s = header(title) + axes(yr, y_label);
  const double slot = (x1 - x0) / std::max<std::size_t>(1, values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double left = x0 + slot * static_cast<double>(i) + slot * 0.15;
    const double top = std::min(py(values[i]), py(0.0)), height = std::abs(py(values[i]) - py(0.0));
    s += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(slot * 0.7) + "\" height=\"" +
         num(height) + "\" fill=\"" + kPalette[i % std::size(kPalette)] + "\"/>\n";
    s += "<text x=\"" + num(left + slot * 0.35) + "\" y=\"" + num(y0 + 16) + "\" text-anchor=\"middle\">" +
         escape(labels[i]) + "</text>\n";
    s += "<text x=\"" + num(left + slot * 0.35) + "\" y=\"" + num(top - 4) + "\" text-anchor=\"middle\">" +
         tick(values[i]) + "</text>\n";
  }
  return s + "</svg>\n";
}

std::string series_csv(const std::vector<Series>& series) {
  std::string s = "series,x,y\n";
  char buf[64];
  for (const auto& se : series)
    for (std::size_t i = 0; i < se.x.size() && i < se.y.size(); ++i) {
      std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", se.x[i], se.y[i]);
      s += se.name + buf;
    }
  return s;
}

}  // namespace alcnn::plot
