#include "fundgrowth/svg_chart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace fundgrowth {
namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v, double step) {
  char buf[32];
  const int decimals = std::max(0, static_cast<int>(-std::floor(std::log10(step) + 1e-9)));
  std::snprintf(buf, sizeof buf, "%.*f", decimals, std::abs(v) < 0.5 * step * 1e-6 ? 0.0 : v);
  return buf;
}

double nice_step(double range, int target) {
  const double raw = range / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  const double nice = norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0;
  return nice * mag;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!std::isfinite(lo)) {
      lo = 0.0;
      hi = 1.0;
    } else if (hi - lo <= 1e-12 * std::max(1.0, std::abs(hi))) {
      const double pad = std::max(1e-3, 0.05 * std::abs(hi));
      lo -= pad;
      hi += pad;
    }
  }
};

// Per-column min/max reduction keeping the first and last points.
std::vector<std::pair<double, double>> reduce(const LineSeries& s, double x_lo, double x_hi, int columns) {
  std::vector<std::pair<double, double>> pts;
  const std::size_t n = std::min(s.x.size(), s.y.size());
  if (n <= static_cast<std::size_t>(2 * columns)) {
    for (std::size_t i = 0; i < n; ++i) pts.emplace_back(s.x[i], s.y[i]);
    return pts;
  }
  const double width = (x_hi - x_lo) / columns;
  std::size_t i = 0;
  while (i < n) {
    const int bucket = static_cast<int>(std::min<double>(columns - 1, std::floor((s.x[i] - x_lo) / width)));
    std::size_t lo_i = i, hi_i = i, j = i;
    bool broken = !std::isfinite(s.y[i]);
    for (; j < n; ++j) {
      const int b = static_cast<int>(std::min<double>(columns - 1, std::floor((s.x[j] - x_lo) / width)));
      if (b != bucket) break;
      if (!std::isfinite(s.y[j])) {
        broken = true;
        continue;
      }
      if (!std::isfinite(s.y[lo_i]) || s.y[j] < s.y[lo_i]) lo_i = j;
      if (!std::isfinite(s.y[hi_i]) || s.y[j] > s.y[hi_i]) hi_i = j;
    }
    const std::size_t first = std::min(lo_i, hi_i), second = std::max(lo_i, hi_i);
    pts.emplace_back(s.x[first], s.y[first]);
    if (second != first) pts.emplace_back(s.x[second], s.y[second]);
    if (broken) pts.emplace_back(s.x[j - 1], std::numeric_limits<double>::quiet_NaN());
    i = j;
  }
  return pts;
}

}  // namespace

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render_svg(const LineChart& chart) {
  const double left = 70, right = 20, top = 40, bottom = 50;
  const double w = chart.width, h = chart.height;
  const double plot_w = w - left - right, plot_h = h - top - bottom;

  Range xr, yr;
  for (const auto& s : chart.series) {
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  xr.finish();
  yr.finish();
  const double y_step = nice_step(yr.hi - yr.lo, 6);
  const double y_lo = std::floor(yr.lo / y_step) * y_step;
  const double y_hi = std::ceil(yr.hi / y_step) * y_step;
  const double x_step = nice_step(xr.hi - xr.lo, 8);

  auto px = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
  auto py = [&](double y) { return top + (y_hi - y) / (y_hi - y_lo) * plot_h; };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << chart.width << "\" height=\""
      << chart.height << "\" viewBox=\"0 0 " << chart.width << ' ' << chart.height << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << chart.width << "\" height=\"" << chart.height
      << "\" fill=\"white\"/>\n"
      << "<text x=\"" << num(w / 2) << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"15\">" << xml_escape(chart.title) << "</text>\n";

  svg << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  for (double y = y_lo; y <= y_hi + 0.5 * y_step; y += y_step) {
    svg << "<line x1=\"" << num(left) << "\" y1=\"" << num(py(y)) << "\" x2=\"" << num(left + plot_w)
        << "\" y2=\"" << num(py(y)) << "\" stroke=\"#e0e0e0\"/>\n"
        << "<text x=\"" << num(left - 6) << "\" y=\"" << num(py(y) + 4) << "\" text-anchor=\"end\">"
        << tick_label(y, y_step) << "</text>\n";
  }
  for (double x = std::ceil(xr.lo / x_step) * x_step; x <= xr.hi + 1e-9 * x_step; x += x_step) {
    svg << "<line x1=\"" << num(px(x)) << "\" y1=\"" << num(top + plot_h) << "\" x2=\"" << num(px(x))
        << "\" y2=\"" << num(top + plot_h + 5) << "\" stroke=\"#333\"/>\n"
        << "<text x=\"" << num(px(x)) << "\" y=\"" << num(top + plot_h + 18)
        << "\" text-anchor=\"middle\">" << tick_label(x, x_step) << "</text>\n";
  }
  svg << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(plot_w)
      << "\" height=\"" << num(plot_h) << "\" fill=\"none\" stroke=\"#333\"/>\n";
  if (!chart.y_label.empty()) {
    svg << "<text transform=\"translate(16," << num(top + plot_h / 2) << ") rotate(-90)\" "
        << "text-anchor=\"middle\">" << xml_escape(chart.y_label) << "</text>\n";
  }
  svg << "</g>\n";

  const int columns = static_cast<int>(plot_w);
  for (std::size_t k = 0; k < chart.series.size(); ++k) {
    const auto& s = chart.series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    std::ostringstream points;
    auto flush = [&] {
      const std::string p = points.str();
      if (!p.empty()) {
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"" << p
            << "\"/>\n";
      }
      points.str("");
    };
    for (const auto& [x, y] : reduce(s, xr.lo, xr.hi, columns)) {
      if (!std::isfinite(y) || !std::isfinite(x)) {
        flush();
        continue;
      }
      points << num(px(x)) << ',' << num(py(y)) << ' ';
    }
    flush();
  }

  // Legend
  svg << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (std::size_t k = 0; k < chart.series.size(); ++k) {
    const double ly = top + 12 + 15 * static_cast<double>(k);
    svg << "<line x1=\"" << num(left + 10) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(left + 30)
        << "\" y2=\"" << num(ly) << "\" stroke=\"" << kPalette[k % std::size(kPalette)]
        << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << num(left + 35) << "\" y=\"" << num(ly + 4) << "\">"
        << xml_escape(chart.series[k].label) << "</text>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace fundgrowth
