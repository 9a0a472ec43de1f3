#include "bhpfit/gof.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "bhpfit/errors.h"

namespace bhpfit {
namespace {

double checked(double f) {
  if (!(f >= 0.0 && f <= 1.0)) {
    throw NumericError("model cdf returned a value outside [0, 1]");
  }
  return f;
}

}  // namespace

double ks_statistic(std::span<const double> sample, const CdfFunction& cdf) {
  if (sample.empty()) throw std::invalid_argument("empty KS sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double f = checked(cdf(sorted[i]));
    const double below = static_cast<double>(i) / n;  // F_n just left of x
    const double at = static_cast<double>(j) / n;     // F_n at x
    d = std::max({d, at - f, f - below});
    i = j;
  }
  return d;
}

double kolmogorov_q(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.0) {
    // Jacobi theta dual of the same function; the alternating series
    // converges too slowly here.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double sum = 0.0;
    for (int k = 1; k < 100; ++k) {
      const double odd = 2.0 * k - 1.0;
      const double term = std::exp(-odd * odd * pi2 / (8.0 * lambda * lambda));
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return std::clamp(
        1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum, 0.0, 1.0);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j < 1000; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    if (term < 1e-12) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_pvalue(double statistic, std::size_t n) {
  if (n == 0) throw std::invalid_argument("KS p-value needs n >= 1");
  if (statistic <= 0.0) return 1.0;
  const double root = std::sqrt(static_cast<double>(n));
  return kolmogorov_q((root + 0.12 + 0.11 / root) * statistic);
}

KsResult ks_test(std::span<const double> sample, const CdfFunction& cdf) {
  KsResult r;
  r.statistic = ks_statistic(sample, cdf);
  r.n = sample.size();
  r.p_value = ks_pvalue(r.statistic, r.n);
  return r;
}

double DistanceCurve::max() const {
  return d.empty() ? 0.0 : *std::max_element(d.begin(), d.end());
}

void DistanceCurve::write_csv(std::ostream& out) const {
  out << "x,d\n";
  char buf[64];
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", x[i], d[i]);
    out << buf;
  }
}

DistanceCurve distance_curve(std::span<const double> sample,
                             const CdfFunction& cdf, double lower,
                             double upper, std::size_t points) {
  if (sample.empty()) throw std::invalid_argument("empty KS sample");
  if (points < 2 || !(lower < upper)) {
    throw std::invalid_argument("distance curve needs >= 2 points on a "
                                "non-empty interval");
  }
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  DistanceCurve curve;
  curve.x.resize(points);
  curve.d.resize(points);
  const double step = (upper - lower) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    const double x = i + 1 == points ? upper : lower + i * step;
    const auto count = std::upper_bound(sorted.begin(), sorted.end(), x) -
                       sorted.begin();
    curve.x[i] = x;
    curve.d[i] = std::abs(static_cast<double>(count) / n - checked(cdf(x)));
  }
  return curve;
}

}  // namespace bhpfit
