#ifndef BHPFIT_GOF_H_
#define BHPFIT_GOF_H_

#include <cstddef>
#include <functional>
#include <ostream>
#include <span>
#include <vector>

namespace bhpfit {

using CdfFunction = std::function<double(double)>;

struct KsResult {
  double statistic = 0.0;  // sup |F_n - F|
  std::size_t n = 0;
  double p_value = 1.0;
};

// One-sample Kolmogorov-Smirnov distance. Ties are grouped so the empirical
// step jumps by multiplicity / n. Throws std::invalid_argument on an empty
// sample and NumericError if the model cdf leaves [0, 1].
double ks_statistic(std::span<const double> sample, const CdfFunction& cdf);

// Q(lambda) = 2 sum_{j>=1} (-1)^(j-1) exp(-2 j^2 lambda^2).
double kolmogorov_q(double lambda);

// Asymptotic p-value with the small-sample correction
// lambda = (sqrt(n) + 0.12 + 0.11 / sqrt(n)) D.
double ks_pvalue(double statistic, std::size_t n);

KsResult ks_test(std::span<const double> sample, const CdfFunction& cdf);

// |F_n(x) - F(x)| on `points` equally spaced x in [lower, upper], with F_n
// right-continuous.
struct DistanceCurve {
  std::vector<double> x;
  std::vector<double> d;

  double max() const;
  // Two-column CSV "x,d".
  void write_csv(std::ostream& out) const;
};

DistanceCurve distance_curve(std::span<const double> sample,
                             const CdfFunction& cdf, double lower,
                             double upper, std::size_t points);

}  // namespace bhpfit

#endif  // BHPFIT_GOF_H_
