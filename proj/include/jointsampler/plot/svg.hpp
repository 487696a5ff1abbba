#ifndef JOINTSAMPLER_PLOT_SVG_HPP_
#define JOINTSAMPLER_PLOT_SVG_HPP_

#include <string>
#include <vector>

namespace jointsampler::plot {

// One line on the chart. `lo`/`hi` (same length as x) add a shaded band.
struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> lo;
  std::vector<double> hi;
};

struct ChartOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  int width = 860;
  int height = 520;
};

// Renders a self-contained SVG document (no external references).
std::string render_line_chart(const std::vector<Series>& series, const ChartOptions& options);

std::string xml_escape(const std::string& s);

}  // namespace jointsampler::plot

#endif  // JOINTSAMPLER_PLOT_SVG_HPP_
