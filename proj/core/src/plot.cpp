#include "synthlearn/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "synthlearn/common.hpp"

namespace synthlearn {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 72.0;
constexpr double kRight = 24.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 56.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Axis {
  bool log = false;
  double lo = 0.0;
  double hi = 1.0;

  bool drawable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }

  // Fraction of the axis, 0 at lo.
  double unit(double v) const {
    if (log) return (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo));
    return (v - lo) / (hi - lo);
  }

  void fit(double vlo, double vhi) {
    lo = vlo;
    hi = vhi;
    if (log) {
      if (lo == hi) {
        lo *= 0.5;
        hi *= 2.0;
      }
    } else {
      if (lo == hi) {
        double pad = lo == 0.0 ? 0.5 : std::fabs(lo) * 0.05;
        lo -= pad;
        hi += pad;
      } else {
        double pad = (hi - lo) * 0.04;
        lo -= pad;
        hi += pad;
      }
    }
  }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      int d0 = static_cast<int>(std::ceil(std::log10(lo) - 1e-9));
      int d1 = static_cast<int>(std::floor(std::log10(hi) + 1e-9));
      int stride = 1 + std::max(0, (d1 - d0) / 8);
      for (int d = d0; d <= d1; d += stride) out.push_back(std::pow(10.0, d));
      if (out.size() < 2) {
        out.clear();
        out.push_back(lo);
        out.push_back(std::sqrt(lo * hi));
        out.push_back(hi);
      }
      return out;
    }
    double range = hi - lo;
    double rough = range / 5.0;
    double mag = std::pow(10.0, std::floor(std::log10(rough)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
      step = m * mag;
      if (range / step <= 6.0) break;
    }
    double t = std::ceil(lo / step) * step;
    while (t <= hi + step * 1e-9) {
      out.push_back(std::fabs(t) < step * 1e-9 ? 0.0 : t);
      t += step;
    }
    return out;
  }
};

}  // namespace

void write_svg_plot(const std::string& path, const PlotSpec& spec) {
  Axis ax{spec.log_x, 0, 1};
  Axis ay{spec.log_y, 0, 1};
  double xlo = 0, xhi = 0, ylo = 0, yhi = 0;
  bool any = false;
  auto widen = [&](double x, double y) {
    if (!ax.drawable(x) || !ay.drawable(y)) return;
    if (!any) {
      xlo = xhi = x;
      ylo = yhi = y;
      any = true;
    } else {
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
      ylo = std::min(ylo, y);
      yhi = std::max(yhi, y);
    }
  };
  for (const auto& s : spec.series) {
    if (s.x.size() != s.y.size())
      throw ContractError("plot series '" + s.label + "': x/y size mismatch");
    for (std::size_t i = 0; i < s.x.size(); ++i) widen(s.x[i], s.y[i]);
  }
  for (const auto& [mx, my] : spec.markers) widen(mx, my);
  if (!any) throw ConfigError("plot '" + spec.title + "' has no drawable points");
  ax.fit(xlo, xhi);
  ay.fit(ylo, yhi);

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + ax.unit(v) * pw; };
  auto py = [&](double v) { return kTop + (1.0 - ay.unit(v)) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(kWidth) << "\" height=\""
      << fmt(kHeight) << "\" viewBox=\"0 0 " << fmt(kWidth) << " " << fmt(kHeight) << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"22\" font-family=\"sans-serif\" "
      << "font-size=\"15\" text-anchor=\"middle\">" << xml_escape(spec.title) << "</text>\n";

  for (double t : ax.ticks()) {
    double x = px(t);
    svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(x)
        << "\" y2=\"" << fmt(kTop + ph) << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(kTop + ph + 18)
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" << fmt(t)
        << "</text>\n";
  }
  for (double t : ay.ticks()) {
    double y = py(t);
    svg << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(kLeft + pw)
        << "\" y2=\"" << fmt(y) << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(y + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << fmt(t)
        << "</text>\n";
  }
  svg << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(pw)
      << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"#333333\"/>\n";
  svg << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"" << fmt(kHeight - 14)
      << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">"
      << xml_escape(spec.xlabel) << "</text>\n";
  svg << "<text x=\"18\" y=\"" << fmt(kTop + ph / 2)
      << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
      << "transform=\"rotate(-90 18 " << fmt(kTop + ph / 2) << ")\">" << xml_escape(spec.ylabel)
      << "</text>\n";

  for (std::size_t si = 0; si < spec.series.size(); ++si) {
    const auto& s = spec.series[si];
    const char* color = kPalette[si % kPaletteSize];
    std::vector<std::string> segment;
    auto flush = [&]() {
      if (segment.size() == 1) {
        svg << "<circle cx=\"" << segment[0].substr(0, segment[0].find(','));
        std::string ys = segment[0].substr(segment[0].find(',') + 1);
        svg << "\" cy=\"" << ys << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
      } else if (segment.size() > 1) {
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
        for (std::size_t i = 0; i < segment.size(); ++i) {
          if (i) svg << " ";
          svg << segment[i];
        }
        svg << "\"/>\n";
      }
      segment.clear();
    };
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (ax.drawable(s.x[i]) && ay.drawable(s.y[i]))
        segment.push_back(fmt(px(s.x[i])) + "," + fmt(py(s.y[i])));
      else
        flush();
    }
    flush();
  }

  for (const auto& [mx, my] : spec.markers) {
    if (!ax.drawable(mx) || !ay.drawable(my)) continue;
    svg << "<circle cx=\"" << fmt(px(mx)) << "\" cy=\"" << fmt(py(my))
        << "\" r=\"4.5\" fill=\"none\" stroke=\"#111111\" stroke-width=\"1.6\"/>\n";
  }

  double ly = kTop + 14;
  for (std::size_t si = 0; si < spec.series.size(); ++si) {
    const auto& s = spec.series[si];
    if (s.label.empty()) continue;
    const char* color = kPalette[si % kPaletteSize];
    double lx = kLeft + pw - 150;
    svg << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\"" << fmt(lx + 22)
        << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << fmt(lx + 28) << "\" y=\"" << fmt(ly)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(s.label) << "</text>\n";
    ly += 16;
  }

  svg << "</svg>\n";
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write plot: " + path);
  std::string out = svg.str();
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("plot write failed: " + path);
}

GrayImage montage(const std::vector<GrayImage>& images, std::size_t columns) {
  if (images.empty()) throw ContractError("montage requires at least one image");
  if (columns == 0) throw ContractError("montage requires a positive column count");
  const std::size_t h = images[0].height;
  const std::size_t w = images[0].width;
  for (const auto& img : images)
    if (img.height != h || img.width != w) throw ContractError("montage images differ in size");
  const std::size_t gap = 2;
  const std::size_t cols = std::min(columns, images.size());
  const std::size_t rows = (images.size() + cols - 1) / cols;
  GrayImage out(rows * h + (rows - 1) * gap, cols * w + (cols - 1) * gap, ValueRange::Unit);
  for (std::size_t i = 0; i < images.size(); ++i) {
    const GrayImage unit = images[i].range == ValueRange::Unit ? images[i] : to_unit(images[i]);
    const std::size_t oy = (i / cols) * (h + gap);
    const std::size_t ox = (i % cols) * (w + gap);
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = 0; x < w; ++x) out.at(oy + y, ox + x) = unit.at(y, x);
  }
  return out;
}

}  // namespace synthlearn
