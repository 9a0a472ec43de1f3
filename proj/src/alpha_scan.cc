#include "bhpfit/alpha_scan.h"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "bhpfit/fluctuation.h"
#include "bhpfit/gof.h"
#include "bhpfit/quadrature.h"

namespace bhpfit {

std::vector<double> AlphaGrid::values() const {
  if (!(step > 0.0) || !(min < max)) {
    throw std::invalid_argument("alpha grid needs min < max and step > 0");
  }
  const auto count =
      static_cast<std::size_t>(std::floor((max - min) / step + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    // Snap to 1e-12 so 0.4 + 10 * 0.01 prints as 0.5.
    out.push_back(std::round((min + static_cast<double>(i) * step) * 1e12) /
                  1e12);
  }
  return out;
}

void ScanResult::write_csv(std::ostream& out) const {
  out << "alpha,D,p,mu,sigma,L,R\n";
  char buf[256];
  for (const auto& e : entries) {
    std::snprintf(buf, sizeof(buf),
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", e.alpha,
                  e.statistic, e.p_value, e.mean, e.sd, e.lower, e.upper);
    out << buf;
  }
}

ScanEntry evaluate_alpha(std::span<const double> magnitudes,
                         const BhpTable& table, double alpha) {
  const FluctuationSet set = normalize(magnitudes, alpha);
  const TruncatedDist model = truncate(table, set.lower, set.upper);
  const KsResult ks =
      ks_test(set.values, [&](double x) { return model.cdf(x); });
  return {alpha, ks.statistic, ks.p_value, set.mean, set.sd, set.lower,
          set.upper};
}

ScanResult scan(const SignedReturns& population, const BhpTable& table,
                const AlphaGrid& grid) {
  const std::vector<double> alphas = grid.values();
  ScanResult result;
  result.sign = population.sign;
  result.population = population.count();
  result.entries.resize(alphas.size());
  parallel_for(alphas.size(), [&](std::size_t i) {
    result.entries[i] = evaluate_alpha(population.magnitudes, table, alphas[i]);
  });
  for (std::size_t i = 1; i < result.entries.size(); ++i) {
    if (result.entries[i].p_value > result.entries[result.best_index].p_value) {
      result.best_index = i;
    }
  }
  return result;
}

}  // namespace bhpfit
