#include "pvf/plot.hpp"

#include "pvf/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace pvf {

namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 440;
constexpr double kLeft = 70;
constexpr double kRight = 170;
constexpr double kTop = 40;
constexpr double kBottom = 60;

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                              "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.2f", v);
  return buffer;
}

std::string label_num(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.3g", v);
  return buffer;
}

std::string escape(const std::string& text) {
  std::string out;
  for (const char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(ch);
    }
  }
  return out;
}

void open_svg(std::ostringstream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(title) << "</text>\n";
}

struct Axis {
  double lo;
  double hi;
  double map(double v, double from, double to) const {
    return hi == lo ? (from + to) / 2 : from + (v - lo) / (hi - lo) * (to - from);
  }
};

Axis padded(double lo, double hi) {
  if (lo == hi) return {lo - 1, hi + 1};
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

void y_axis(std::ostringstream& out, const Axis& y, const std::string& label) {
  const double plot_bottom = kHeight - kBottom;
  for (int t = 0; t <= 5; ++t) {
    const double v = y.lo + (y.hi - y.lo) * t / 5.0;
    const double py = y.map(v, plot_bottom, kTop);
    out << "<line x1=\"" << num(kLeft) << "\" x2=\"" << num(kWidth - kRight) << "\" y1=\"" << num(py)
        << "\" y2=\"" << num(py) << "\" stroke=\"#e5e5e5\"/>\n"
        << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py + 4) << "\" text-anchor=\"end\">"
        << label_num(v) << "</text>\n";
  }
  out << "<text transform=\"translate(18," << num((kTop + plot_bottom) / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(label) << "</text>\n";
  if (y.lo < 0 && y.hi > 0) {
    const double zero = y.map(0, plot_bottom, kTop);
    out << "<line x1=\"" << num(kLeft) << "\" x2=\"" << num(kWidth - kRight) << "\" y1=\"" << num(zero)
        << "\" y2=\"" << num(zero) << "\" stroke=\"#999\"/>\n";
  }
}

void legend(std::ostringstream& out, const std::vector<std::string>& labels) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double y = kTop + 10 + 18.0 * static_cast<double>(i);
    out << "<rect x=\"" << num(kWidth - kRight + 15) << "\" y=\"" << num(y - 9) << "\" width=\"12\" height=\"10\" fill=\""
        << kPalette[i % kPalette.size()] << "\"/>\n"
        << "<text x=\"" << num(kWidth - kRight + 32) << "\" y=\"" << num(y) << "\">" << escape(labels[i]) << "</text>\n";
  }
}

}  // namespace

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<Series>& series, bool log_x) {
  double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
  auto tx = [&](double x) { return log_x ? std::log10(x) : x; };
  for (const auto& s : series) {
    require(s.x.size() == s.y.size(), "series x and y differ in length");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      require(!log_x || s.x[i] > 0, "log axis needs positive x");
      x_lo = std::min(x_lo, tx(s.x[i]));
      x_hi = std::max(x_hi, tx(s.x[i]));
      y_lo = std::min(y_lo, s.y[i]);
      y_hi = std::max(y_hi, s.y[i]);
    }
  }
  if (!std::isfinite(x_lo)) x_lo = x_hi = y_lo = y_hi = 0;
  const Axis x_axis = padded(x_lo, x_hi);
  const Axis y = padded(std::min(y_lo, 0.0), std::max(y_hi, 0.0));
  const double plot_bottom = kHeight - kBottom;

  std::ostringstream out;
  open_svg(out, title);
  y_axis(out, y, y_label);
  std::vector<double> ticks;
  for (const auto& s : series) {
    for (const double x : s.x) ticks.push_back(x);
  }
  std::sort(ticks.begin(), ticks.end());
  ticks.erase(std::unique(ticks.begin(), ticks.end()), ticks.end());
  for (const double t : ticks) {
    const double px = x_axis.map(tx(t), kLeft, kWidth - kRight);
    out << "<text x=\"" << num(px) << "\" y=\"" << num(plot_bottom + 18) << "\" text-anchor=\"middle\">"
        << label_num(t) << "</text>\n";
  }
  out << "<text x=\"" << num((kLeft + kWidth - kRight) / 2) << "\" y=\"" << num(kHeight - 18)
      << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    labels.push_back(s.label);
    out << "<polyline fill=\"none\" stroke-width=\"2\" stroke=\"" << kPalette[i % kPalette.size()] << "\" points=\"";
    for (std::size_t j = 0; j < s.x.size(); ++j) {
      out << (j ? " " : "") << num(x_axis.map(tx(s.x[j]), kLeft, kWidth - kRight)) << ','
          << num(y.map(s.y[j], plot_bottom, kTop));
    }
    out << "\"/>\n";
  }
  legend(out, labels);
  out << "</svg>\n";
  return out.str();
}

std::string bar_chart_svg(const std::string& title, const std::string& y_label,
                          const std::vector<std::string>& segment_labels,
                          const std::vector<BarGroup>& groups) {
  double y_hi = 0, y_lo = 0;
  for (const auto& g : groups) {
    require(g.values.size() == segment_labels.size(), "bar group size does not match segments");
    for (const double v : g.values) {
      y_hi = std::max(y_hi, v);
      y_lo = std::min(y_lo, v);
    }
  }
  const Axis y = padded(y_lo, y_hi);
  const double plot_bottom = kHeight - kBottom;
  std::ostringstream out;
  open_svg(out, title);
  y_axis(out, y, y_label);
  const double span = kWidth - kRight - kLeft;
  const double slot = groups.empty() ? span : span / static_cast<double>(groups.size());
  const double bar = segment_labels.empty() ? 0 : slot * 0.8 / static_cast<double>(segment_labels.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double start = kLeft + slot * static_cast<double>(g) + slot * 0.1;
    for (std::size_t s = 0; s < segment_labels.size(); ++s) {
      const double v = groups[g].values[s];
      const double top = y.map(std::max(v, 0.0), plot_bottom, kTop);
      const double base = y.map(std::min(v, 0.0), plot_bottom, kTop);
      out << "<rect x=\"" << num(start + bar * static_cast<double>(s)) << "\" y=\"" << num(top) << "\" width=\""
          << num(bar * 0.95) << "\" height=\"" << num(base - top) << "\" fill=\"" << kPalette[s % kPalette.size()]
          << "\"/>\n";
    }
    out << "<text x=\"" << num(start + slot * 0.4) << "\" y=\"" << num(plot_bottom + 18)
        << "\" text-anchor=\"middle\">" << escape(groups[g].label) << "</text>\n";
  }
  legend(out, segment_labels);
  out << "</svg>\n";
  return out.str();
}

}  // namespace pvf
