#ifndef BHPFIT_QUADRATURE_H_
#define BHPFIT_QUADRATURE_H_

#include <cstddef>
#include <functional>
#include <vector>

namespace bhpfit {

// Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(int order);

// Composite Gauss-Legendre integral of f over [a, b] with `panels` equal
// panels.
template <typename F>
double integrate_panels(const F& f, double a, double b, std::size_t panels,
                        const GaussLegendreRule& rule) {
  const double width = (b - a) / static_cast<double>(panels);
  double total = 0.0;
  for (std::size_t k = 0; k < panels; ++k) {
    const double mid = a + (static_cast<double>(k) + 0.5) * width;
    double panel = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      panel += rule.weights[j] * f(mid + 0.5 * width * rule.nodes[j]);
    }
    total += 0.5 * width * panel;
  }
  return total;
}

// Runs body(i) for i in [0, count) on up to hardware_concurrency threads.
// Each index is visited exactly once; the caller owns result ordering.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace bhpfit

#endif  // BHPFIT_QUADRATURE_H_
