#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "skewgof/errors.hpp"

// Minimal SVG plotter for rejection-rate curves: axes, polylines with point
// markers, a dotted horizontal reference line at the nominal level, and a
// small legend.  No dependency, fixed canvas.

namespace skewgof {

struct SvgSeries {
  std::string label;
  std::vector<double> x, y;
};

namespace detail {

inline std::string fmt_tick(double v) {
  char buf[32];
  if (std::fabs(v - std::round(v)) < 1e-9 && std::fabs(v) < 1e7)
    std::snprintf(buf, sizeof buf, "%.0f", v);
  else
    std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace detail

inline void write_power_svg(const std::string& path, const std::vector<SvgSeries>& series,
                            double delta, const std::string& x_label,
                            const std::string& title = "") {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  const double W = 640, H = 440, L = 64, R = 24, T = title.empty() ? 24.0 : 44.0, B = 72;
  const double pw = W - L - R, ph = H - T - B;

  double xmin = 1e300, xmax = -1e300;
  for (const auto& s : series)
    for (double v : s.x) {
      xmin = std::min(xmin, v);
      xmax = std::max(xmax, v);
    }
  if (!(xmin < xmax)) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  const double ymin = 0.0, ymax = 1.0;
  auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return T + (ymax - y) / (ymax - ymin) * ph; };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write " + path);
  char buf[256];
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty())
    out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\""
        << " font-size=\"15\">" << title << "</text>\n";

  // frame and y ticks every 0.2
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" "
                "stroke=\"black\"/>\n",
                L, T, pw, ph);
  out << buf;
  for (int k = 0; k <= 5; ++k) {
    double y = 0.2 * k;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ddd\"/>\n", L,
                  py(y), L + pw, py(y));
    if (k > 0 && k < 5) out << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\" font-family=\"sans-serif\" "
                  "font-size=\"12\">%.1f</text>\n",
                  L - 6, py(y) + 4, y);
    out << buf;
  }
  // x ticks at the union of series points (deduplicated)
  std::vector<double> xt;
  for (const auto& s : series) xt.insert(xt.end(), s.x.begin(), s.x.end());
  std::sort(xt.begin(), xt.end());
  xt.erase(std::unique(xt.begin(), xt.end(),
                       [](double a, double b) { return std::fabs(a - b) < 1e-12; }),
           xt.end());
  for (double x : xt) {
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                  px(x), T + ph, px(x), T + ph + 5);
    out << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                  "font-size=\"12\">%s</text>\n",
                  px(x), T + ph + 20, detail::fmt_tick(x).c_str());
    out << buf;
  }
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                "font-size=\"13\">%s</text>\n",
                L + pw / 2, H - 28, x_label.c_str());
  out << buf;
  out << "<text transform=\"translate(16," << T + ph / 2
      << ") rotate(-90)\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << "rejection rate</text>\n";

  // dotted nominal level
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\" "
                "stroke-dasharray=\"3,4\"/>\n",
                L, py(delta), L + pw, py(delta));
  out << buf;

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = palette[s % 8];
    std::string pts;
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.1f,%.1f ", px(series[s].x[i]), py(series[s].y[i]));
      pts += buf;
    }
    out << "<polyline points=\"" << pts << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.8\"/>\n";
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      std::snprintf(buf, sizeof buf, "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"3\" fill=\"%s\"/>\n",
                    px(series[s].x[i]), py(series[s].y[i]), color);
      out << buf;
    }
    // legend entry
    double ly = T + 16 + 18.0 * static_cast<double>(s);
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" "
                  "stroke-width=\"2\"/>\n",
                  L + pw - 150, ly, L + pw - 126, ly, color);
    out << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"12\">%s"
                  "</text>\n",
                  L + pw - 120, ly + 4, series[s].label.c_str());
    out << buf;
  }
  out << "</svg>\n";
  if (!out) throw data_error("short write to " + path);
}

}  // namespace skewgof
