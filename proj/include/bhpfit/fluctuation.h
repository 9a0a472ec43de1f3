#ifndef BHPFIT_FLUCTUATION_H_
#define BHPFIT_FLUCTUATION_H_

#include <cstddef>
#include <span>
#include <vector>

#include "bhpfit/market_data.h"

namespace bhpfit {

// Population (1/n) mean and standard deviation of m^alpha.
struct RescaledMoments {
  double mean = 0.0;
  double sd = 0.0;
};

// Throws std::invalid_argument for an empty input, a non-positive magnitude or
// alpha outside (0, 2]; NumericError when sd vanishes.
RescaledMoments rescale_stats(std::span<const double> magnitudes, double alpha);

// alpha fluctuations (m^alpha - mean) / sd of one signed population.
struct FluctuationSet {
  Sign sign = Sign::kPositive;
  double alpha = 1.0;
  std::vector<double> values;
  double mean = 0.0;
  double sd = 1.0;
  double lower = 0.0;  // min(values)
  double upper = 0.0;  // max(values)

  std::size_t count() const { return values.size(); }
};

FluctuationSet normalize(std::span<const double> magnitudes, double alpha,
                         Sign sign = Sign::kPositive);

inline FluctuationSet normalize(const SignedReturns& population, double alpha) {
  return normalize(population.magnitudes, alpha, population.sign);
}

}  // namespace bhpfit

#endif  // BHPFIT_FLUCTUATION_H_
