#include "bhpfit/svg_plot.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace bhpfit {
namespace {

constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 36.0;
constexpr double kMarginBottom = 50.0;

std::string fmt(double v, const char* spec = "%.2f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

// Roughly `target` ticks at 1, 2 or 5 times a power of ten.
std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
  std::vector<double> ticks;
  if (!(hi > lo)) return {lo};
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step;
       t += step) {
    ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  }
  return ticks;
}

}  // namespace

std::string render_svg(const PlotSpec& spec,
                       const std::vector<PlotSeries>& series) {
  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -x_lo;
  double y_lo = x_lo;
  double y_hi = -x_lo;
  auto usable = [&](double y) { return std::isfinite(y) && (!spec.log_y || y > 0.0); };
  for (const auto& s : series) {
    for (double x : s.x) {
      if (!std::isfinite(x)) continue;
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
    }
    for (double y : s.y) {
      if (!usable(y)) continue;
      const double v = spec.log_y ? std::log10(y) : y;
      y_lo = std::min(y_lo, v);
      y_hi = std::max(y_hi, v);
    }
  }
  if (!std::isfinite(x_lo)) {
    x_lo = 0.0;
    x_hi = 1.0;
  }
  if (!std::isfinite(y_lo)) {
    y_lo = 0.0;
    y_hi = 1.0;
  }
  if (!spec.log_y) y_lo = std::min(y_lo, 0.0);
  if (spec.log_y) {
    y_lo = std::floor(y_lo);
    y_hi = std::ceil(y_hi);
  }
  if (x_hi <= x_lo) x_hi = x_lo + 1.0;
  if (y_hi <= y_lo) y_hi = y_lo + 1.0;
  if (!spec.log_y) y_hi += 0.05 * (y_hi - y_lo);

  const double plot_w = spec.width - kMarginLeft - kMarginRight;
  const double plot_h = spec.height - kMarginTop - kMarginBottom;
  auto px = [&](double x) {
    return kMarginLeft + (x - x_lo) / (x_hi - x_lo) * plot_w;
  };
  auto py = [&](double y) {
    const double v = spec.log_y ? std::log10(y) : y;
    const double clamped = std::clamp(v, y_lo, y_hi);
    return kMarginTop + (y_hi - clamped) / (y_hi - y_lo) * plot_h;
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width
      << "\" height=\"" << spec.height << "\" viewBox=\"0 0 " << spec.width
      << ' ' << spec.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << fmt(spec.width / 2.0) << "\" y=\"22\" "
      << "text-anchor=\"middle\" font-size=\"14\">" << escape(spec.title)
      << "</text>\n";
  svg << "<rect x=\"" << fmt(kMarginLeft) << "\" y=\"" << fmt(kMarginTop)
      << "\" width=\"" << fmt(plot_w) << "\" height=\"" << fmt(plot_h)
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double t : nice_ticks(x_lo, x_hi)) {
    const double x = px(t);
    svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(kMarginTop + plot_h)
        << "\" x2=\"" << fmt(x) << "\" y2=\"" << fmt(kMarginTop + plot_h + 5)
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(kMarginTop + plot_h + 18)
        << "\" text-anchor=\"middle\">" << fmt(t, "%g") << "</text>\n";
  }
  std::vector<double> y_ticks;
  if (spec.log_y) {
    const int span = static_cast<int>(y_hi - y_lo);
    const int every = std::max(1, span / 8);
    for (int e = static_cast<int>(y_lo); e <= static_cast<int>(y_hi); e += every) {
      y_ticks.push_back(std::pow(10.0, e));
    }
  } else {
    y_ticks = nice_ticks(y_lo, y_hi);
  }
  for (double t : y_ticks) {
    const double y = py(t);
    svg << "<line x1=\"" << fmt(kMarginLeft - 5) << "\" y1=\"" << fmt(y)
        << "\" x2=\"" << fmt(kMarginLeft) << "\" y2=\"" << fmt(y)
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fmt(kMarginLeft - 8) << "\" y=\"" << fmt(y + 4)
        << "\" text-anchor=\"end\">"
        << (spec.log_y ? "1e" + fmt(std::log10(t), "%.0f") : fmt(t, "%g"))
        << "</text>\n";
  }
  svg << "<text x=\"" << fmt(kMarginLeft + plot_w / 2) << "\" y=\""
      << fmt(spec.height - 10.0) << "\" text-anchor=\"middle\">"
      << escape(spec.x_label) << "</text>\n";
  svg << "<text transform=\"translate(16," << fmt(kMarginTop + plot_h / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(spec.y_label)
      << "</text>\n";

  int legend_row = 0;
  for (const auto& s : series) {
    if (s.style == PlotSeries::Style::kMarkers) {
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        if (!usable(s.y[i])) continue;
        svg << "<circle cx=\"" << fmt(px(s.x[i])) << "\" cy=\""
            << fmt(py(s.y[i])) << "\" r=\"2.5\" fill=\"" << s.color
            << "\"/>\n";
      }
    } else {
      std::ostringstream path;
      bool pen_down = false;
      auto point = [&](double x, double y) {
        if (!usable(y)) {
          pen_down = false;
          return;
        }
        path << (pen_down ? " L" : " M") << fmt(px(x)) << ',' << fmt(py(y));
        pen_down = true;
      };
      if (s.style == PlotSeries::Style::kStep) {
        for (std::size_t i = 0; i < s.y.size() && i + 1 < s.x.size(); ++i) {
          point(s.x[i], s.y[i]);
          point(s.x[i + 1], s.y[i]);
        }
      } else {
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
          point(s.x[i], s.y[i]);
        }
      }
      const std::string d = path.str();
      if (!d.empty()) {
        svg << "<path d=\"" << d.substr(1) << "\" fill=\"none\" stroke=\""
            << s.color << "\" stroke-width=\"1.5\"/>\n";
      }
    }
    if (!s.label.empty()) {
      const double ly = kMarginTop + 14.0 + 16.0 * legend_row++;
      const double lx = kMarginLeft + plot_w - 170.0;
      svg << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly - 4)
          << "\" x2=\"" << fmt(lx + 20) << "\" y2=\"" << fmt(ly - 4)
          << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
      svg << "<text x=\"" << fmt(lx + 26) << "\" y=\"" << fmt(ly) << "\">"
          << escape(s.label) << "</text>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace bhpfit
