#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace srblab::experiment {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotLabels {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;  // non-positive values are dropped
};

// Standalone SVG with axes, tick labels and one polyline (plus markers) per
// series. Non-finite points are skipped. Throws ArgumentError when there is
// nothing to draw, IoError when the file cannot be written.
std::string render_svg(std::span<const Series> series, const PlotLabels& labels = {});
void emit_svg(std::span<const Series> series, const std::filesystem::path& path, const PlotLabels& labels = {});

}  // namespace srblab::experiment
