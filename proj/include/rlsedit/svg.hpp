#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "rlsedit/errors.hpp"

namespace rlsedit {

struct Series {
  std::string label;
  std::vector<double> xs;
  std::vector<double> ys;
};

namespace svg_detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline const char* color(std::size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                  "#ff7f0e", "#9467bd", "#8c564b"};
  return palette[i % 6];
}

} // namespace svg_detail

/// Minimal dependency-free line chart. Switches the y axis to log10 when all
/// plotted values are positive and span more than three decades. Trace
/// inspection, not presentation, is the goal.
inline std::string render_line_chart(const std::string& title,
                                     const std::string& x_label,
                                     const std::string& y_label,
                                     std::span<const Series> series) {
  const double width = 720, height = 420;
  const double ml = 70, mr = 20, mt = 36, mb = 46;
  const double pw = width - ml - mr, ph = height - mt - mb;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  bool any = false, all_positive = true;
  for (const Series& s : series)
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      any = true;
      xmin = std::min(xmin, s.xs[i]);
      xmax = std::max(xmax, s.xs[i]);
      ymin = std::min(ymin, s.ys[i]);
      ymax = std::max(ymax, s.ys[i]);
      if (s.ys[i] <= 0.0) all_positive = false;
    }
  if (!any) {
    xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    all_positive = false;
  }
  const bool log_y = all_positive && ymax / ymin > 1e3;
  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
  double lo = ty(ymin), hi = ty(ymax);
  if (lo == hi) {  // constant column: pad so the flat line sits centered
    lo -= 1.0;
    hi += 1.0;
  }
  if (xmin == xmax) {
    xmin -= 1.0;
    xmax += 1.0;
  }

  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return mt + (hi - ty(y)) / (hi - lo) * ph; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         svg_detail::num(width) + "\" height=\"" + svg_detail::num(height) +
         "\" viewBox=\"0 0 " + svg_detail::num(width) + " " +
         svg_detail::num(height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + svg_detail::num(width / 2) + "\" y=\"20\" font-size=\"14\" "
         "text-anchor=\"middle\" font-family=\"sans-serif\">" + title + "</text>\n";

  // Axes.
  out += "<line x1=\"" + svg_detail::num(ml) + "\" y1=\"" + svg_detail::num(mt) +
         "\" x2=\"" + svg_detail::num(ml) + "\" y2=\"" + svg_detail::num(mt + ph) +
         "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + svg_detail::num(ml) + "\" y1=\"" + svg_detail::num(mt + ph) +
         "\" x2=\"" + svg_detail::num(ml + pw) + "\" y2=\"" +
         svg_detail::num(mt + ph) + "\" stroke=\"black\"/>\n";
  out += "<text x=\"" + svg_detail::num(ml + pw / 2) + "\" y=\"" +
         svg_detail::num(height - 10) +
         "\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\">" +
         x_label + "</text>\n";
  out += "<text x=\"16\" y=\"" + svg_detail::num(mt + ph / 2) +
         "\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "transform=\"rotate(-90 16 " + svg_detail::num(mt + ph / 2) + ")\">" +
         y_label + (log_y ? " (log)" : "") + "</text>\n";

  // Ticks: 5 per axis; decade labels when the y axis is logarithmic.
  for (int i = 0; i <= 4; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 4.0;
    const double gx = px(fx);
    out += "<line x1=\"" + svg_detail::num(gx) + "\" y1=\"" +
           svg_detail::num(mt + ph) + "\" x2=\"" + svg_detail::num(gx) +
           "\" y2=\"" + svg_detail::num(mt + ph + 4) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + svg_detail::num(gx) + "\" y=\"" +
           svg_detail::num(mt + ph + 16) +
           "\" font-size=\"10\" text-anchor=\"middle\" font-family=\"sans-serif\">" +
           svg_detail::num(fx) + "</text>\n";

    const double fv = lo + (hi - lo) * i / 4.0;
    const double gy = mt + ph - ph * i / 4.0;
    const double label = log_y ? std::pow(10.0, fv) : fv;
    out += "<line x1=\"" + svg_detail::num(ml - 4) + "\" y1=\"" +
           svg_detail::num(gy) + "\" x2=\"" + svg_detail::num(ml) + "\" y2=\"" +
           svg_detail::num(gy) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + svg_detail::num(ml - 8) + "\" y=\"" +
           svg_detail::num(gy + 3) +
           "\" font-size=\"10\" text-anchor=\"end\" font-family=\"sans-serif\">" +
           svg_detail::num(label) + "</text>\n";
  }

  std::size_t idx = 0;
  for (const Series& s : series) {
    std::string pts;
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (log_y && s.ys[i] <= 0.0) continue;
      pts += svg_detail::num(px(s.xs[i])) + "," + svg_detail::num(py(s.ys[i])) + " ";
    }
    out += "<polyline fill=\"none\" stroke=\"" +
           std::string(svg_detail::color(idx)) + "\" stroke-width=\"1.5\" points=\"" +
           pts + "\"/>\n";
    out += "<text x=\"" + svg_detail::num(ml + pw - 6) + "\" y=\"" +
           svg_detail::num(mt + 14 + 14 * static_cast<double>(idx)) +
           "\" font-size=\"11\" text-anchor=\"end\" fill=\"" +
           svg_detail::color(idx) + "\" font-family=\"sans-serif\">" + s.label +
           "</text>\n";
    ++idx;
  }
  out += "</svg>\n";
  return out;
}

inline void write_svg(const std::filesystem::path& path, const std::string& body) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << body;
}

} // namespace rlsedit
