#ifndef BHPFIT_SVG_PLOT_H_
#define BHPFIT_SVG_PLOT_H_

#include <string>
#include <vector>

namespace bhpfit {

// Minimal SVG line/step plots for the report figures.
struct PlotSeries {
  enum class Style { kLine, kStep, kMarkers };

  std::string label;
  std::vector<double> x;
  // For kStep, x holds bin edges and y one value per bin.
  std::vector<double> y;
  Style style = Style::kLine;
  std::string color = "#1f77b4";
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  int width = 640;
  int height = 420;
};

std::string render_svg(const PlotSpec& spec,
                       const std::vector<PlotSeries>& series);

}  // namespace bhpfit

#endif  // BHPFIT_SVG_PLOT_H_
