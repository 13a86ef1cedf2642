#include "ideanet/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ideanet/csv.hpp"

namespace ideanet::svg {

namespace {

constexpr double kPanelW = 420, kPanelH = 300;
constexpr double kMarginL = 56, kMarginR = 16, kMarginT = 32, kMarginB = 44;

std::string num(double v) { return format_real(v); }

// "Nice" tick step close to span/5.
double tick_step(double span) {
  if (span <= 0) return 1.0;
  double raw = span / 5.0;
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double mult : {1.0, 2.0, 5.0, 10.0})
    if (raw <= mult * mag) return mult * mag;
  return 10.0 * mag;
}

}  // namespace

std::string render_panels(const std::vector<Panel>& panels, int columns) {
  if (columns < 1) columns = 1;
  const int rows = (int(panels.size()) + columns - 1) / columns;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
      << columns * kPanelW << "\" height=\"" << rows * kPanelH
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";

  for (std::size_t idx = 0; idx < panels.size(); ++idx) {
    const auto& panel = panels[idx];
    const double ox = double(idx % columns) * kPanelW;
    const double oy = double(idx / columns) * kPanelH;
    const double plot_w = kPanelW - kMarginL - kMarginR;
    const double plot_h = kPanelH - kMarginT - kMarginB;

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : panel.series) {
      for (double v : s.x) {
        xmin = std::min(xmin, v);
        xmax = std::max(xmax, v);
      }
      for (double v : s.y) {
        ymin = std::min(ymin, v);
        ymax = std::max(ymax, v);
      }
      for (double v : s.ci_lo) ymin = std::min(ymin, v);
      for (double v : s.ci_hi) ymax = std::max(ymax, v);
    }
    if (!std::isfinite(xmin)) {
      xmin = 0;
      xmax = 1;
      ymin = 0;
      ymax = 1;
    }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto sx = [&](double v) {
      return ox + kMarginL + (v - xmin) / (xmax - xmin) * plot_w;
    };
    auto sy = [&](double v) {
      return oy + kMarginT + plot_h - (v - ymin) / (ymax - ymin) * plot_h;
    };

    out << "<rect x=\"" << ox + kMarginL << "\" y=\"" << oy + kMarginT
        << "\" width=\"" << plot_w << "\" height=\"" << plot_h
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ox + kPanelW / 2 << "\" y=\"" << oy + 18
        << "\" text-anchor=\"middle\" font-weight=\"bold\">" << panel.title
        << "</text>\n";
    out << "<text x=\"" << ox + kPanelW / 2 << "\" y=\"" << oy + kPanelH - 8
        << "\" text-anchor=\"middle\">" << panel.x_label << "</text>\n";
    out << "<text x=\"" << ox + 14 << "\" y=\"" << oy + kMarginT + plot_h / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 " << ox + 14 << " "
        << oy + kMarginT + plot_h / 2 << ")\">" << panel.y_label << "</text>\n";

    for (double tx = std::ceil(xmin / tick_step(xmax - xmin)) * tick_step(xmax - xmin);
         tx <= xmax + 1e-12; tx += tick_step(xmax - xmin)) {
      out << "<line x1=\"" << sx(tx) << "\" y1=\"" << oy + kMarginT + plot_h
          << "\" x2=\"" << sx(tx) << "\" y2=\"" << oy + kMarginT + plot_h + 4
          << "\" stroke=\"black\"/>\n";
      out << "<text x=\"" << sx(tx) << "\" y=\"" << oy + kMarginT + plot_h + 16
          << "\" text-anchor=\"middle\">" << num(tx) << "</text>\n";
    }
    for (double ty = std::ceil(ymin / tick_step(ymax - ymin)) * tick_step(ymax - ymin);
         ty <= ymax + 1e-12; ty += tick_step(ymax - ymin)) {
      out << "<line x1=\"" << ox + kMarginL - 4 << "\" y1=\"" << sy(ty)
          << "\" x2=\"" << ox + kMarginL << "\" y2=\"" << sy(ty)
          << "\" stroke=\"black\"/>\n";
      out << "<text x=\"" << ox + kMarginL - 6 << "\" y=\"" << sy(ty) + 4
          << "\" text-anchor=\"end\">" << num(ty) << "</text>\n";
    }

    double legend_y = oy + kMarginT + 12;
    for (const auto& s : panel.series) {
      const std::string color = s.color.empty() ? "steelblue" : s.color;
      // CI whiskers first so the line sits on top.
      for (std::size_t i = 0; i < s.ci_lo.size() && i < s.x.size(); ++i) {
        out << "<line x1=\"" << sx(s.x[i]) << "\" y1=\"" << sy(s.ci_lo[i])
            << "\" x2=\"" << sx(s.x[i]) << "\" y2=\"" << sy(s.ci_hi[i])
            << "\" stroke=\"" << color << "\" stroke-width=\"1\"/>\n";
        for (double w : {s.ci_lo[i], s.ci_hi[i]})
          out << "<line x1=\"" << sx(s.x[i]) - 3 << "\" y1=\"" << sy(w)
              << "\" x2=\"" << sx(s.x[i]) + 3 << "\" y2=\"" << sy(w)
              << "\" stroke=\"" << color << "\"/>\n";
      }
      out << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i)
        out << sx(s.x[i]) << "," << sy(s.y[i]) << " ";
      out << "\"/>\n";
      for (std::size_t i = 0; i < s.x.size(); ++i)
        out << "<circle cx=\"" << sx(s.x[i]) << "\" cy=\"" << sy(s.y[i])
            << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
      if (!s.label.empty()) {
        out << "<line x1=\"" << ox + kMarginL + plot_w - 110 << "\" y1=\""
            << legend_y << "\" x2=\"" << ox + kMarginL + plot_w - 90
            << "\" y2=\"" << legend_y << "\" stroke=\"" << color
            << "\" stroke-width=\"1.5\"/>\n";
        out << "<text x=\"" << ox + kMarginL + plot_w - 86 << "\" y=\""
            << legend_y + 4 << "\">" << s.label << "</text>\n";
        legend_y += 14;
      }
    }
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace ideanet::svg
