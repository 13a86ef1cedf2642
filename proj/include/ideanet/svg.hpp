#pragma once

#include <string>
#include <vector>

namespace ideanet::svg {

struct Series {
  std::string label;
  std::string color;  // SVG color string
  std::vector<double> x, y;
  std::vector<double> ci_lo, ci_hi;  // optional whiskers, same length as x
};

struct Panel {
  std::string title;
  std::string x_label, y_label;
  std::vector<Series> series;
};

/// Minimal hand-emitted grid of line charts (axes, ticks, legend, whiskers).
std::string render_panels(const std::vector<Panel>& panels, int columns);

}  // namespace ideanet::svg
