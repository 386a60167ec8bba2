#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fasmo/trace_io.hpp"

namespace fasmo {

struct SvgSeries {
  std::string label;
  std::string color;
  std::span<const double> x;
  std::span<const double> y;
};

namespace detail {

inline std::string svg_num(double v, const char* fmt = "%.2f") {
  std::array<char, 48> buf;
  const int len = std::snprintf(buf.data(), buf.size(), fmt, v);
  return std::string(buf.data(), static_cast<std::size_t>(len));
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

/// Self-contained SVG line chart (inline styling, no external assets). Long
/// series are downsampled to at most max_points per polyline; rendering is a
/// convenience layer, the CSV trace is the authoritative output.
inline std::string line_chart_svg(const std::string& title, const std::string& x_label,
                                  const std::string& y_label, std::span<const SvgSeries> series,
                                  std::size_t max_points = 2000) {
  constexpr double kWidth = 840, kHeight = 520;
  constexpr double kLeft = 70, kRight = 810, kTop = 50, kBottom = 460;

  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  bool first = true;
  for (const auto& s : series) {
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (first) {
        x_min = x_max = s.x[k];
        y_min = y_max = s.y[k];
        first = false;
      }
      x_min = std::min(x_min, s.x[k]);
      x_max = std::max(x_max, s.x[k]);
      y_min = std::min(y_min, s.y[k]);
      y_max = std::max(y_max, s.y[k]);
    }
  }
  if (x_max == x_min) x_max = x_min + 1.0;
  if (y_max == y_min) y_max = y_min + 1.0;
  const double y_pad = 0.05 * (y_max - y_min);
  y_min -= y_pad;
  y_max += y_pad;
  const auto px = [&](double x) {
    return kLeft + (x - x_min) / (x_max - x_min) * (kRight - kLeft);
  };
  const auto py = [&](double y) {
    return kBottom - (y - y_min) / (y_max - y_min) * (kBottom - kTop);
  };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::svg_num(kWidth, "%.0f") +
         "\" height=\"" + detail::svg_num(kHeight, "%.0f") + "\" viewBox=\"0 0 840 520\">\n";
  out += "<rect width=\"840\" height=\"520\" fill=\"white\"/>\n";
  out += "<text x=\"420\" y=\"28\" font-family=\"sans-serif\" font-size=\"18\" "
         "text-anchor=\"middle\">" + detail::xml_escape(title) + "</text>\n";

  // axes and ticks
  out += "<line x1=\"70\" y1=\"460\" x2=\"810\" y2=\"460\" stroke=\"black\"/>\n";
  out += "<line x1=\"70\" y1=\"50\" x2=\"70\" y2=\"460\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double xv = x_min + (x_max - x_min) * k / 5.0;
    const double yv = y_min + (y_max - y_min) * k / 5.0;
    const double xp = px(xv), yp = py(yv);
    out += "<line x1=\"" + detail::svg_num(xp) + "\" y1=\"460\" x2=\"" + detail::svg_num(xp) +
           "\" y2=\"465\" stroke=\"black\"/>\n";
    out += "<text x=\"" + detail::svg_num(xp) + "\" y=\"480\" font-family=\"sans-serif\" "
           "font-size=\"12\" text-anchor=\"middle\">" + detail::svg_num(xv, "%.4g") + "</text>\n";
    out += "<line x1=\"65\" y1=\"" + detail::svg_num(yp) + "\" x2=\"70\" y2=\"" +
           detail::svg_num(yp) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"60\" y=\"" + detail::svg_num(yp + 4) + "\" font-family=\"sans-serif\" "
           "font-size=\"12\" text-anchor=\"end\">" + detail::svg_num(yv, "%.4g") + "</text>\n";
  }
  out += "<text x=\"440\" y=\"508\" font-family=\"sans-serif\" font-size=\"14\" "
         "text-anchor=\"middle\">" + detail::xml_escape(x_label) + "</text>\n";
  out += "<text x=\"18\" y=\"255\" font-family=\"sans-serif\" font-size=\"14\" "
         "text-anchor=\"middle\" transform=\"rotate(-90 18 255)\">" +
         detail::xml_escape(y_label) + "</text>\n";

  for (const auto& s : series) {
    const std::size_t n = s.x.size();
    if (n == 0) continue;
    const std::size_t stride = std::max<std::size_t>(1, (n + max_points - 1) / max_points);
    out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t k = 0; k < n; k += stride) {
      out += detail::svg_num(px(s.x[k])) + "," + detail::svg_num(py(s.y[k])) + " ";
    }
    if ((n - 1) % stride != 0) {
      out += detail::svg_num(px(s.x[n - 1])) + "," + detail::svg_num(py(s.y[n - 1]));
    }
    out += "\"/>\n";
  }

  // legend
  double ly = 60;
  for (const auto& s : series) {
    out += "<line x1=\"700\" y1=\"" + detail::svg_num(ly) + "\" x2=\"730\" y2=\"" +
           detail::svg_num(ly) + "\" stroke=\"" + s.color + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"736\" y=\"" + detail::svg_num(ly + 4) +
           "\" font-family=\"sans-serif\" font-size=\"13\">" + detail::xml_escape(s.label) +
           "</text>\n";
    ly += 18;
  }
  out += "</svg>\n";
  return out;
}

inline void write_line_chart_svg(const std::filesystem::path& path, const std::string& title,
                                 const std::string& x_label, const std::string& y_label,
                                 std::span<const SvgSeries> series) {
  write_file_atomic(path, line_chart_svg(title, x_label, y_label, series));
}

}  // namespace fasmo
