#ifndef BHPFIT_SYNTHETIC_H_
#define BHPFIT_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bhpfit/bhp_dist.h"
#include "bhpfit/market_data.h"

namespace bhpfit {

// Return series whose alpha fluctuations follow a truncated BHP law by
// construction: y ~ BHP on [lower, table end], m = (sd * y + mean)^(1/alpha).
struct SyntheticSpec {
  std::uint64_t seed = 7;
  std::size_t size = 2500;  // members of each signed population
  double alpha = 0.5;
  double mean = 0.09;
  double sd = 0.045;
};

// Lowest y that keeps sd * y + mean strictly positive, with a small margin.
double synthetic_lower_bound(const BhpTable& table, double mean, double sd);

std::vector<double> synthetic_magnitudes(const BhpTable& table, double alpha,
                                         double mean, double sd,
                                         std::size_t count, std::uint64_t seed);

// `size` positive and `size` negative returns in a seeded random order,
// compounded from a close of 1000 on consecutive weekdays.
PriceSeries synthetic_prices(const BhpTable& table, const SyntheticSpec& spec);

}  // namespace bhpfit

#endif  // BHPFIT_SYNTHETIC_H_
