#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace fsaug {

// Minimal hand-emitted line plots: deterministic output, no plotting
// dependency, diffable in tests.
struct SvgSeries {
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  double stroke_width = 1.0;
};

void write_svg_lines(const std::filesystem::path& path,
                     const std::vector<SvgSeries>& series,
                     const std::string& title = "", int width_px = 720,
                     int height_px = 400);

}  // namespace fsaug
