/*
 * Copyright 2026 The pamkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "pamkit/plot.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "pamkit/error.h"
#include "pamkit/format.h"

namespace pamkit {
namespace {

constexpr double kPanelWidth = 640.0;
constexpr double kPanelHeight = 400.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 55.0;
constexpr int kTicks = 5;

std::string Xml(const std::string& text) {
  std::string out;
  for (char c : text) {
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

std::string Num(double v) { return FormatFixed(v, 2); }

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

Range PaddedRange(std::span<const double> v) {
  if (v.empty()) return {};
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  Range r{*lo, *hi};
  const double span = r.hi - r.lo;
  if (span == 0.0) {
    r.lo -= 0.5;
    r.hi += 0.5;
  } else {
    r.lo -= 0.05 * span;
    r.hi += 0.05 * span;
  }
  return r;
}

// Maps data coordinates into one panel whose top edge is at `top`.
struct Frame {
  Range x;
  Range y;
  double top = 0.0;

  double Px(double v) const {
    return kMarginLeft + (v - x.lo) / (x.hi - x.lo) *
                             (kPanelWidth - kMarginLeft - kMarginRight);
  }
  double Py(double v) const {
    return top + kPanelHeight - kMarginBottom -
           (v - y.lo) / (y.hi - y.lo) * (kPanelHeight - kMarginTop - kMarginBottom);
  }
};

std::string TickLabel(double v, const Range& r) {
  const double span = r.hi - r.lo;
  const int decimals = span >= 100 ? 0 : span >= 1 ? 2 : 3;
  return FormatFixed(v, decimals);
}

void DrawAxes(std::string& svg, const Frame& f, const std::string& title,
              const std::string& x_label, const std::string& y_label) {
  const double left = kMarginLeft;
  const double right = kPanelWidth - kMarginRight;
  const double top = f.top + kMarginTop;
  const double bottom = f.top + kPanelHeight - kMarginBottom;
  svg += "<rect x=\"" + Num(left) + "\" y=\"" + Num(top) + "\" width=\"" +
         Num(right - left) + "\" height=\"" + Num(bottom - top) +
         "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (int i = 0; i <= kTicks; ++i) {
    const double xv = f.x.lo + (f.x.hi - f.x.lo) * i / kTicks;
    const double yv = f.y.lo + (f.y.hi - f.y.lo) * i / kTicks;
    const double px = f.Px(xv);
    const double py = f.Py(yv);
    svg += "<line x1=\"" + Num(px) + "\" y1=\"" + Num(bottom) + "\" x2=\"" +
           Num(px) + "\" y2=\"" + Num(bottom + 5) + "\" stroke=\"#333\"/>\n";
    svg += "<text x=\"" + Num(px) + "\" y=\"" + Num(bottom + 18) +
           "\" text-anchor=\"middle\" font-size=\"11\">" + TickLabel(xv, f.x) +
           "</text>\n";
    svg += "<line x1=\"" + Num(left - 5) + "\" y1=\"" + Num(py) + "\" x2=\"" +
           Num(left) + "\" y2=\"" + Num(py) + "\" stroke=\"#333\"/>\n";
    svg += "<text x=\"" + Num(left - 8) + "\" y=\"" + Num(py + 4) +
           "\" text-anchor=\"end\" font-size=\"11\">" + TickLabel(yv, f.y) +
           "</text>\n";
  }
  svg += "<text x=\"" + Num(kPanelWidth / 2) + "\" y=\"" + Num(f.top + 24) +
         "\" text-anchor=\"middle\" font-size=\"15\">" + Xml(title) + "</text>\n";
  svg += "<text x=\"" + Num((left + right) / 2) + "\" y=\"" +
         Num(f.top + kPanelHeight - 12) +
         "\" text-anchor=\"middle\" font-size=\"13\">" + Xml(x_label) +
         "</text>\n";
  const double cy = (top + bottom) / 2;
  svg += "<text x=\"18\" y=\"" + Num(cy) +
         "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 " +
         Num(cy) + ")\">" + Xml(y_label) + "</text>\n";
}

std::string Header(double height) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + Num(kPanelWidth) +
         "\" height=\"" + Num(height) + "\" viewBox=\"0 0 " + Num(kPanelWidth) +
         " " + Num(height) + "\" font-family=\"sans-serif\">\n" +
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

}  // namespace

std::string RenderScatterSvg(const ScatterPlot& plot) {
  if (plot.x.size() != plot.y.size()) throw Error("scatter plot: x and y differ in length");
  Frame f{PaddedRange(plot.x), PaddedRange(plot.y), 0.0};
  std::string svg = Header(kPanelHeight);
  DrawAxes(svg, f, plot.title, plot.x_label, plot.y_label);
  for (std::size_t i = 0; i < plot.x.size(); ++i) {
    svg += "<circle class=\"point\" cx=\"" + Num(f.Px(plot.x[i])) + "\" cy=\"" +
           Num(f.Py(plot.y[i])) + "\" r=\"3\" fill=\"#1f77b4\" fill-opacity=\"0.7\"/>\n";
  }
  if (plot.x.size() >= 2) {
    const double n = static_cast<double>(plot.x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < plot.x.size(); ++i) {
      mx += plot.x[i];
      my += plot.y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < plot.x.size(); ++i) {
      sxy += (plot.x[i] - mx) * (plot.y[i] - my);
      sxx += (plot.x[i] - mx) * (plot.x[i] - mx);
    }
    if (sxx > 0.0) {
      const double slope = sxy / sxx;
      const double x0 = f.x.lo;
      const double x1 = f.x.hi;
      // Clip the line to the plotted y range by drawing through a clip path.
      svg += "<clipPath id=\"plot-area\"><rect x=\"" + Num(kMarginLeft) + "\" y=\"" +
             Num(kMarginTop) + "\" width=\"" +
             Num(kPanelWidth - kMarginLeft - kMarginRight) + "\" height=\"" +
             Num(kPanelHeight - kMarginTop - kMarginBottom) + "\"/></clipPath>\n";
      svg += "<line class=\"fit\" clip-path=\"url(#plot-area)\" x1=\"" + Num(f.Px(x0)) +
             "\" y1=\"" + Num(f.Py(my + slope * (x0 - mx))) + "\" x2=\"" +
             Num(f.Px(x1)) + "\" y2=\"" + Num(f.Py(my + slope * (x1 - mx))) +
             "\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
    }
  }
  if (plot.pcc) {
    svg += "<text class=\"pcc\" x=\"" + Num(kMarginLeft + 10) + "\" y=\"" +
           Num(kMarginTop + 18) + "\" font-size=\"13\">PCC = " +
           FormatFixed(*plot.pcc, 3) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::string RenderLinePanelsSvg(const std::string& title,
                                const std::string& y_label,
                                std::span<const LineSeries> series) {
  const double height = kPanelHeight * static_cast<double>(std::max<std::size_t>(series.size(), 1));
  std::string svg = Header(height);
  if (series.empty()) {
    svg += "<text x=\"" + Num(kPanelWidth / 2) + "\" y=\"" + Num(kPanelHeight / 2) +
           "\" text-anchor=\"middle\">" + Xml(title) + ": no data</text>\n";
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const LineSeries& ls = series[s];
    if (ls.x.size() != ls.y.size()) throw Error("line plot: x and y differ in length");
    Frame f{PaddedRange(ls.x), PaddedRange(ls.y), kPanelHeight * static_cast<double>(s)};
    DrawAxes(svg, f, title + ": " + ls.name, ls.x_label, y_label);
    std::string points;
    for (std::size_t i = 0; i < ls.x.size(); ++i) {
      if (i > 0) points += ' ';
      points += Num(f.Px(ls.x[i])) + "," + Num(f.Py(ls.y[i]));
    }
    svg += "<polyline class=\"series\" data-name=\"" + Xml(ls.name) +
           "\" points=\"" + points +
           "\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
    for (std::size_t i = 0; i < ls.x.size(); ++i) {
      svg += "<circle cx=\"" + Num(f.Px(ls.x[i])) + "\" cy=\"" + Num(f.Py(ls.y[i])) +
             "\" r=\"3.5\" fill=\"#1f77b4\"/>\n";
    }
  }
  svg += "</svg>\n";
  return svg;
}

void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(path.string() + ": cannot write");
  out << text;
  if (!out) throw Error(path.string() + ": write failed");
}

}  // namespace pamkit
