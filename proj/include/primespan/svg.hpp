#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace primespan {

// Minimal chart writer: polyline for curves, circle for data dots, rect for
// the frame.  Output carries no timestamps or environment details, so a rerun
// emits identical bytes.  Callers transform coordinates (e.g. to log scale)
// before adding series.
class SvgPlot {
 public:
  SvgPlot(double width = 800, double height = 520, double margin = 36)
      : width_(width), height_(height), margin_(margin) {}

  void add_points(const std::vector<std::pair<double, double>>& pts,
                  double radius = 2.5, const std::string& color = "#1f4e8c") {
    include(pts);
    series_.push_back({Kind::points, pts, color, radius, false});
  }

  void add_curve(const std::vector<std::pair<double, double>>& pts,
                 const std::string& color = "#b03a2e", double stroke = 1.5,
                 bool dashed = false) {
    include(pts);
    series_.push_back({Kind::curve, pts, color, stroke, dashed});
  }

  // Horizontal reference at a data-space height, drawn dashed by default.
  void add_hline(double y, const std::string& color = "#666666", bool dashed = true) {
    hlines_.push_back({y, color, dashed});
  }

  // Optional explicit window; otherwise the union of added series, padded.
  void set_range(double xmin, double xmax, double ymin, double ymax) {
    xmin_ = xmin; xmax_ = xmax; ymin_ = ymin; ymax_ = ymax;
    fixed_range_ = true;
  }

  std::string render() const {
    double xmin = xmin_, xmax = xmax_, ymin = ymin_, ymax = ymax_;
    if (!fixed_range_) {
      if (!have_data_) { xmin = 0; xmax = 1; ymin = 0; ymax = 1; }
      for (const auto& h : hlines_) { ymin = std::min(ymin, h.y); ymax = std::max(ymax, h.y); }
      pad(xmin, xmax);
      pad(ymin, ymax);
    }
    double px0 = margin_, px1 = width_ - margin_;
    double py0 = height_ - margin_, py1 = margin_;  // y axis points up
    auto sx = [&](double x) { return px0 + (x - xmin) / (xmax - xmin) * (px1 - px0); };
    auto sy = [&](double y) { return py0 + (y - ymin) / (ymax - ymin) * (py1 - py0); };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width_) +
           "\" height=\"" + num(height_) + "\" viewBox=\"0 0 " + num(width_) + " " +
           num(height_) + "\">\n";
    out += "<rect x=\"" + num(px0) + "\" y=\"" + num(py1) + "\" width=\"" +
           num(px1 - px0) + "\" height=\"" + num(py0 - py1) +
           "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    for (const auto& h : hlines_) {
      if (h.y < ymin || h.y > ymax) continue;
      out += "<polyline points=\"" + num(px0) + "," + num(sy(h.y)) + " " + num(px1) +
             "," + num(sy(h.y)) + "\" fill=\"none\" stroke=\"" + h.color +
             "\" stroke-width=\"1\"";
      if (h.dashed) out += " stroke-dasharray=\"6,4\"";
      out += "/>\n";
    }
    for (const auto& s : series_) {
      if (s.kind == Kind::curve) {
        out += "<polyline points=\"";
        for (size_t i = 0; i < s.pts.size(); ++i) {
          if (i) out += " ";
          out += num(sx(s.pts[i].first)) + "," + num(sy(s.pts[i].second));
        }
        out += "\" fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"" +
               num(s.size) + "\"";
        if (s.dashed) out += " stroke-dasharray=\"6,4\"";
        out += "/>\n";
      } else {
        for (const auto& p : s.pts)
          out += "<circle cx=\"" + num(sx(p.first)) + "\" cy=\"" + num(sy(p.second)) +
                 "\" r=\"" + num(s.size) + "\" fill=\"" + s.color + "\"/>\n";
      }
    }
    out += "</svg>\n";
    return out;
  }

  void write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("svg: cannot open " + path);
    f << render();
  }

 private:
  enum class Kind { points, curve };
  struct Series {
    Kind kind;
    std::vector<std::pair<double, double>> pts;
    std::string color;
    double size;
    bool dashed;
  };
  struct HLine {
    double y;
    std::string color;
    bool dashed;
  };

  static std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
  }

  static void pad(double& lo, double& hi) {
    if (hi <= lo) { lo -= 1.0; hi += 1.0; return; }
    double d = 0.05 * (hi - lo);
    lo -= d;
    hi += d;
  }

  void include(const std::vector<std::pair<double, double>>& pts) {
    for (const auto& p : pts) {
      if (!have_data_) {
        xmin_ = xmax_ = p.first;
        ymin_ = ymax_ = p.second;
        have_data_ = true;
      } else if (!fixed_range_) {
        xmin_ = std::min(xmin_, p.first);
        xmax_ = std::max(xmax_, p.first);
        ymin_ = std::min(ymin_, p.second);
        ymax_ = std::max(ymax_, p.second);
      }
    }
  }

  double width_, height_, margin_;
  double xmin_ = 0, xmax_ = 1, ymin_ = 0, ymax_ = 1;
  bool have_data_ = false, fixed_range_ = false;
  std::vector<Series> series_;
  std::vector<HLine> hlines_;
};

}  // namespace primespan
