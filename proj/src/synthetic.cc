#include "bhpfit/synthetic.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "bhpfit/random.h"

namespace bhpfit {

double synthetic_lower_bound(const BhpTable& table, double mean, double sd) {
  if (!(sd > 0.0) || !(mean > 0.0)) {
    throw std::invalid_argument("synthetic mean and sd must be positive");
  }
  return std::max(table.xs().front(), -(mean / sd) * (1.0 - 1e-3));
}

std::vector<double> synthetic_magnitudes(const BhpTable& table, double alpha,
                                         double mean, double sd,
                                         std::size_t count,
                                         std::uint64_t seed) {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw std::invalid_argument("alpha must lie in (0, 2]");
  }
  const TruncatedDist dist(table, synthetic_lower_bound(table, mean, sd),
                           table.xs().back());
  std::vector<double> m = dist.sample(seed, count);
  for (double& v : m) v = std::pow(sd * v + mean, 1.0 / alpha);
  return m;
}

PriceSeries synthetic_prices(const BhpTable& table, const SyntheticSpec& spec) {
  if (spec.size < 2) throw std::invalid_argument("synthetic size must be >= 2");
  const auto pos = synthetic_magnitudes(table, spec.alpha, spec.mean, spec.sd,
                                        spec.size, spec.seed);
  const auto neg =
      synthetic_magnitudes(table, spec.alpha, spec.mean, spec.sd, spec.size,
                           spec.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<double> returns;
  returns.reserve(2 * spec.size);
  for (double m : pos) returns.push_back(m);
  for (double m : neg) returns.push_back(-m);

  // Fisher-Yates with our own stream; std::shuffle is not portable.
  UniformStream order(spec.seed + 0x632be59bd9b4e019ULL);
  for (std::size_t i = returns.size(); i > 1; --i) {
    const std::size_t j = order.next_bits() % i;
    std::swap(returns[i - 1], returns[j]);
  }

  using namespace std::chrono;
  Date day = sys_days{year{2000} / January / 3};
  auto next_weekday = [](Date d) {
    do {
      d += days{1};
    } while (weekday{d} == Saturday || weekday{d} == Sunday);
    return d;
  };
  std::vector<PriceObservation> obs;
  obs.reserve(returns.size() + 1);
  double close = 1000.0;
  obs.push_back({day, close});
  for (double r : returns) {
    day = next_weekday(day);
    close *= 1.0 + r;
    obs.push_back({day, close});
  }
  return PriceSeries(std::move(obs));
}

}  // namespace bhpfit
