// Copyright 2026 The maglev-nmpc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "maglev_app/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "maglev/errors.hpp"

namespace maglev::app {
namespace {

constexpr std::array<const char*, 6> kColours{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 36.0;
constexpr double kBottom = 50.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
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
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  void finish() {
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    } else if (lo == hi) {
      const double pad = lo == 0.0 ? 1.0 : 0.05 * std::abs(lo);
      lo -= pad;
      hi += pad;
    }
  }
};

std::vector<double> ticks(const Range& r) {
  const double span = r.hi - r.lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  }
  std::vector<double> out;
  for (double t = std::ceil(r.lo / step) * step; t <= r.hi + 1e-9 * step; t += step) {
    out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  }
  return out;
}

class Canvas {
 public:
  Canvas(const ChartOptions& o, Range x, Range y) : o_(o), x_(x), y_(y) {
    w_ = o.width - kLeft - kRight;
    h_ = o.height - kTop - kBottom;
    svg_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(o.width) + "\" height=\"" +
            std::to_string(o.height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg_ += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg_ += "<text x=\"" + num(o.width / 2.0) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" +
            escape(o.title) + "</text>\n";
  }

  double px(double x) const { return kLeft + (x - x_.lo) / (x_.hi - x_.lo) * w_; }
  double py(double y) const { return kTop + h_ - (y - y_.lo) / (y_.hi - y_.lo) * h_; }

  void axes(bool logY) {
    for (double t : ticks(x_)) {
      svg_ += "<line x1=\"" + num(px(t)) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(px(t)) + "\" y2=\"" +
              num(kTop + h_) + "\" stroke=\"#e0e0e0\"/>\n";
      svg_ += "<text x=\"" + num(px(t)) + "\" y=\"" + num(kTop + h_ + 16) + "\" text-anchor=\"middle\">" +
              tick_label(t) + "</text>\n";
    }
    for (double t : ticks(y_)) {
      svg_ += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(py(t)) + "\" x2=\"" + num(kLeft + w_) + "\" y2=\"" +
              num(py(t)) + "\" stroke=\"#e0e0e0\"/>\n";
      svg_ += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(py(t) + 4) + "\" text-anchor=\"end\">" +
              tick_label(logY ? std::pow(10.0, t) : t) + "</text>\n";
    }
    svg_ += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(w_) + "\" height=\"" + num(h_) +
            "\" fill=\"none\" stroke=\"black\"/>\n";
    svg_ += "<text x=\"" + num(kLeft + w_ / 2) + "\" y=\"" + num(o_.height - 12.0) + "\" text-anchor=\"middle\">" +
            escape(o_.xLabel) + "</text>\n";
    svg_ += "<text transform=\"translate(16," + num(kTop + h_ / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
            escape(o_.yLabel) + "</text>\n";
  }

  void legend(const std::vector<std::string>& labels) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const double y = kTop + 14.0 + 16.0 * static_cast<double>(i);
      const double x = kLeft + w_ - 130.0;
      svg_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y - 9) + "\" width=\"12\" height=\"10\" fill=\"" +
              kColours[i % kColours.size()] + "\"/>\n";
      svg_ += "<text x=\"" + num(x + 18) + "\" y=\"" + num(y) + "\">" + escape(labels[i]) + "</text>\n";
    }
  }

  std::string& body() { return svg_; }
  std::string finish() { return svg_ + "</svg>\n"; }

 private:
  const ChartOptions& o_;
  Range x_;
  Range y_;
  double w_ = 0.0;
  double h_ = 0.0;
  std::string svg_;
};

// Keeps the first point and the per-bucket extremes so peaks survive.
std::vector<std::pair<double, double>> reduce_points(const Series& s, std::size_t maxPoints, bool logY) {
  std::vector<std::pair<double, double>> pts;
  const std::size_t n = std::min(s.x.size(), s.y.size());
  auto yv = [&](std::size_t i) { return logY ? std::log10(std::max(s.y[i], 1e-300)) : s.y[i]; };
  if (n <= maxPoints || maxPoints < 4) {
    for (std::size_t i = 0; i < n; ++i) {
      pts.emplace_back(s.x[i], yv(i));
    }
    return pts;
  }
  const std::size_t buckets = maxPoints / 2;
  for (std::size_t b = 0; b < buckets; ++b) {
    const std::size_t i0 = b * n / buckets;
    const std::size_t i1 = (b + 1) * n / buckets;
    std::size_t lo = i0;
    std::size_t hi = i0;
    for (std::size_t i = i0; i < i1; ++i) {
      if (yv(i) < yv(lo)) {
        lo = i;
      }
      if (yv(i) > yv(hi)) {
        hi = i;
      }
    }
    pts.emplace_back(s.x[std::min(lo, hi)], yv(std::min(lo, hi)));
    if (lo != hi) {
      pts.emplace_back(s.x[std::max(lo, hi)], yv(std::max(lo, hi)));
    }
  }
  return pts;
}

}  // namespace

std::string line_chart(const std::vector<Series>& series, const ChartOptions& options) {
  std::vector<std::vector<std::pair<double, double>>> reduced;
  Range xr;
  Range yr;
  for (const auto& s : series) {
    reduced.push_back(reduce_points(s, options.maxPoints, options.logY));
    for (const auto& [x, y] : reduced.back()) {
      xr.add(x);
      yr.add(y);
    }
  }
  xr.finish();
  yr.finish();
  Canvas c(options, xr, yr);
  c.axes(options.logY);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < reduced.size(); ++i) {
    std::string pts;
    for (const auto& [x, y] : reduced[i]) {
      if (std::isfinite(y)) {
        pts += num(c.px(x)) + ',' + num(c.py(y)) + ' ';
      }
    }
    c.body() += "<polyline fill=\"none\" stroke-width=\"1.2\" stroke=\"" +
                std::string(kColours[i % kColours.size()]) + "\" points=\"" + pts + "\"/>\n";
    labels.push_back(series[i].label);
  }
  c.legend(labels);
  return c.finish();
}

std::string bar_chart(const std::vector<double>& edges, const std::vector<BarGroup>& groups,
                      const ChartOptions& options) {
  Range xr;
  Range yr;
  for (double e : edges) {
    xr.add(e);
  }
  yr.add(0.0);
  for (const auto& g : groups) {
    for (double v : g.values) {
      yr.add(v);
    }
  }
  xr.finish();
  yr.finish();
  Canvas c(options, xr, yr);
  c.axes(false);
  std::vector<std::string> labels;
  const double share = 1.0 / static_cast<double>(std::max<std::size_t>(1, groups.size()));
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& g = groups[gi];
    for (std::size_t b = 0; b + 1 < edges.size() && b < g.values.size(); ++b) {
      const double w = edges[b + 1] - edges[b];
      const double x0 = edges[b] + w * share * static_cast<double>(gi);
      const double x1 = x0 + w * share;
      const double top = c.py(g.values[b]);
      c.body() += "<rect x=\"" + num(c.px(x0)) + "\" y=\"" + num(top) + "\" width=\"" +
                  num(std::max(0.0, c.px(x1) - c.px(x0))) + "\" height=\"" + num(std::max(0.0, c.py(0.0) - top)) +
                  "\" fill=\"" + kColours[gi % kColours.size()] + "\"/>\n";
    }
    labels.push_back(g.label);
  }
  c.legend(labels);
  return c.finish();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write '" + path.string() + "'");
  }
  out << text;
  if (!out) {
    throw IoError("failed writing '" + path.string() + "'");
  }
}

}  // namespace maglev::app
