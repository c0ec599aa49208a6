#include "fsaug/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>

#include "fsaug/errors.hpp"

namespace fsaug {

namespace {
std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}
}  // namespace

void write_svg_lines(const std::filesystem::path& path,
                     const std::vector<SvgSeries>& series,
                     const std::string& title, int width_px, int height_px) {
  std::ofstream out(path);
  if (!out) throw IoError("write_svg_lines: cannot open " + path.string());

  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -x_min, y_min = x_min, y_max = -x_min;
  for (const auto& s : series) {
    for (double v : s.x) {
      x_min = std::min(x_min, v);
      x_max = std::max(x_max, v);
    }
    for (double v : s.y) {
      y_min = std::min(y_min, v);
      y_max = std::max(y_max, v);
    }
  }
  if (!(x_min <= x_max)) {
    x_min = 0;
    x_max = 1;
    y_min = 0;
    y_max = 1;
  }
  if (x_max == x_min) x_max = x_min + 1;
  if (y_max == y_min) y_max = y_min + 1;

  const double margin = 32.0;
  const double plot_w = width_px - 2 * margin;
  const double plot_h = height_px - 2 * margin;
  const auto map_x = [&](double v) {
    return margin + (v - x_min) / (x_max - x_min) * plot_w;
  };
  const auto map_y = [&](double v) {
    return margin + (y_max - v) / (y_max - y_min) * plot_h;
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_px
      << "\" height=\"" << height_px << "\" viewBox=\"0 0 " << width_px << " "
      << height_px << "\">\n";
  out << "<rect x=\"" << px(margin) << "\" y=\"" << px(margin) << "\" width=\""
      << px(plot_w) << "\" height=\"" << px(plot_h)
      << "\" fill=\"none\" stroke=\"#888888\" stroke-width=\"1\"/>\n";
  if (!title.empty())
    out << "<text x=\"" << px(width_px / 2.0)
        << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"14\">"
        << title << "</text>\n";

  for (const auto& s : series) {
    if (s.x.size() != s.y.size())
      throw DimensionError("write_svg_lines: series x/y length mismatch");
    if (s.x.empty()) continue;
    out << "<polyline fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"" << px(s.stroke_width) << "\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (i > 0) out << " ";
      out << px(map_x(s.x[i])) << "," << px(map_y(s.y[i]));
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
  if (!out) throw IoError("write_svg_lines: write failed for " + path.string());
}

}  // namespace fsaug
