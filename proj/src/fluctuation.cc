#include "bhpfit/fluctuation.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bhpfit/errors.h"

namespace bhpfit {
namespace {

void check_inputs(std::span<const double> magnitudes, double alpha) {
  if (magnitudes.empty()) {
    throw std::invalid_argument("empty return population");
  }
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw std::invalid_argument("alpha must lie in (0, 2]");
  }
  for (double m : magnitudes) {
    if (!(m > 0.0) || !std::isfinite(m)) {
      throw std::invalid_argument("magnitudes must be finite and > 0");
    }
  }
}

}  // namespace

RescaledMoments rescale_stats(std::span<const double> magnitudes,
                              double alpha) {
  check_inputs(magnitudes, alpha);
  const double n = static_cast<double>(magnitudes.size());
  double sum = 0.0;
  for (double m : magnitudes) sum += std::pow(m, alpha);
  const double mean = sum / n;
  // Two passes: the same population variance as E[m^2a] - E[m^a]^2 without
  // the cancellation.
  double ss = 0.0;
  for (double m : magnitudes) {
    const double d = std::pow(m, alpha) - mean;
    ss += d * d;
  }
  const double sd = std::sqrt(ss / n);
  if (!(sd > 1e-14 * std::abs(mean))) {
    throw NumericError("degenerate population: rescaled returns have zero "
                       "standard deviation");
  }
  return {mean, sd};
}

FluctuationSet normalize(std::span<const double> magnitudes, double alpha,
                         Sign sign) {
  const RescaledMoments moments = rescale_stats(magnitudes, alpha);
  FluctuationSet set;
  set.sign = sign;
  set.alpha = alpha;
  set.mean = moments.mean;
  set.sd = moments.sd;
  set.values.reserve(magnitudes.size());
  for (double m : magnitudes) {
    set.values.push_back((std::pow(m, alpha) - moments.mean) / moments.sd);
  }
  const auto [lo, hi] = std::minmax_element(set.values.begin(), set.values.end());
  set.lower = *lo;
  set.upper = *hi;
  return set;
}

}  // namespace bhpfit
