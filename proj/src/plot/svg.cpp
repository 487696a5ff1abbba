#include "jointsampler/plot/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace jointsampler::plot {

namespace {

const char* kPalette[] = {"#4878cf", "#ee854a", "#6acc65", "#d65f5f",
                          "#956cb4", "#8c613c", "#dc7ec0", "#797979"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct AxisScale {
  double lo = 0.0, hi = 1.0;
  bool log = false;
  double px0 = 0.0, px1 = 1.0;

  double to_px(double v) const {
    double t = log ? std::log10(v) : v;
    double a = log ? std::log10(lo) : lo;
    double b = log ? std::log10(hi) : hi;
    if (b <= a) b = a + 1.0;
    return px0 + (t - a) / (b - a) * (px1 - px0);
  }
};

bool usable(double v, bool log) { return std::isfinite(v) && (!log || v > 0.0); }

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
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render_line_chart(const std::vector<Series>& series, const ChartOptions& options) {
  if (series.empty()) throw std::invalid_argument("render_line_chart: no series");

  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const Series& s : series) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("series x/y length mismatch");
    if (!s.lo.empty() && (s.lo.size() != s.x.size() || s.hi.size() != s.x.size())) {
      throw std::invalid_argument("series band length mismatch");
    }
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (!usable(s.x[i], options.log_x) || !usable(s.y[i], options.log_y)) continue;
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      y_lo = std::min(y_lo, s.y[i]);
      y_hi = std::max(y_hi, s.y[i]);
      if (!s.lo.empty() && usable(s.lo[i], options.log_y) && usable(s.hi[i], options.log_y)) {
        y_lo = std::min(y_lo, s.lo[i]);
        y_hi = std::max(y_hi, s.hi[i]);
      }
    }
  }
  if (!std::isfinite(x_lo) || !std::isfinite(y_lo)) {
    throw std::invalid_argument("render_line_chart: no plottable points");
  }
  if (x_hi == x_lo) x_hi = x_lo + (options.log_x ? x_lo : 1.0);
  if (y_hi == y_lo) y_hi = y_lo + (options.log_y ? y_lo : 1.0);
  if (!options.log_y) {
    const double pad = 0.05 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;
  }

  const double ml = 70, mr = 170, mt = 46, mb = 52;
  AxisScale xs{x_lo, x_hi, options.log_x, ml, options.width - mr};
  AxisScale ys{y_lo, y_hi, options.log_y, static_cast<double>(options.height - mb), mt};

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
      << options.height << "\" viewBox=\"0 0 " << options.width << " " << options.height
      << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!options.title.empty()) {
    svg << "<text x=\"" << options.width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << xml_escape(options.title)
        << "</text>\n";
  }

  // axes + ticks
  const double ax0 = ml, ax1 = options.width - mr;
  const double ay0 = options.height - mb, ay1 = mt;
  svg << "<line x1=\"" << ax0 << "\" y1=\"" << ay0 << "\" x2=\"" << ax1 << "\" y2=\"" << ay0
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << ax0 << "\" y1=\"" << ay0 << "\" x2=\"" << ax0 << "\" y2=\"" << ay1
      << "\" stroke=\"black\"/>\n";
  const int n_ticks = 5;
  for (int i = 0; i <= n_ticks; ++i) {
    const double f = static_cast<double>(i) / n_ticks;
    const double xv = options.log_x ? std::pow(10.0, std::log10(x_lo) +
                                                         f * (std::log10(x_hi) - std::log10(x_lo)))
                                    : x_lo + f * (x_hi - x_lo);
    const double yv = options.log_y ? std::pow(10.0, std::log10(y_lo) +
                                                         f * (std::log10(y_hi) - std::log10(y_lo)))
                                    : y_lo + f * (y_hi - y_lo);
    const double px = xs.to_px(xv);
    const double py = ys.to_px(yv);
    svg << "<line x1=\"" << px << "\" y1=\"" << ay0 << "\" x2=\"" << px << "\" y2=\"" << ay0 + 5
        << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << px << "\" y=\"" << ay0 + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(xv)
        << "</text>\n"
        << "<line x1=\"" << ax0 - 5 << "\" y1=\"" << py << "\" x2=\"" << ax0 << "\" y2=\"" << py
        << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << ax0 - 8 << "\" y=\"" << py + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(yv)
        << "</text>\n";
  }
  if (!options.x_label.empty()) {
    svg << "<text x=\"" << (ax0 + ax1) / 2 << "\" y=\"" << options.height - 14
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
        << xml_escape(options.x_label) << "</text>\n";
  }
  if (!options.y_label.empty()) {
    svg << "<text x=\"18\" y=\"" << (ay0 + ay1) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "transform=\"rotate(-90 18 " << (ay0 + ay1) / 2 << ")\">"
        << xml_escape(options.y_label) << "</text>\n";
  }

  for (size_t si = 0; si < series.size(); ++si) {
    const Series& s = series[si];
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];

    if (!s.lo.empty()) {
      std::ostringstream path;
      bool first = true;
      for (size_t i = 0; i < s.x.size(); ++i) {
        if (!usable(s.x[i], options.log_x) || !usable(s.lo[i], options.log_y)) continue;
        path << (first ? "M" : "L") << fmt(xs.to_px(s.x[i])) << "," << fmt(ys.to_px(s.lo[i]))
             << " ";
        first = false;
      }
      for (size_t i = s.x.size(); i-- > 0;) {
        if (!usable(s.x[i], options.log_x) || !usable(s.hi[i], options.log_y)) continue;
        path << "L" << fmt(xs.to_px(s.x[i])) << "," << fmt(ys.to_px(s.hi[i])) << " ";
      }
      if (!first) {
        svg << "<path d=\"" << path.str() << "Z\" fill=\"" << color
            << "\" fill-opacity=\"0.18\" stroke=\"none\"/>\n";
      }
    }

    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (!usable(s.x[i], options.log_x) || !usable(s.y[i], options.log_y)) continue;
      svg << fmt(xs.to_px(s.x[i])) << "," << fmt(ys.to_px(s.y[i])) << " ";
    }
    svg << "\"/>\n";

    const double ly = mt + 16.0 * si;
    svg << "<line x1=\"" << ax1 + 10 << "\" y1=\"" << ly << "\" x2=\"" << ax1 + 34 << "\" y2=\""
        << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << ax1 + 40 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(s.label)
        << "</text>\n";
  }

  svg << "</svg>\n";
  return svg.str();
}

}  // namespace jointsampler::plot
