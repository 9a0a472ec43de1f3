#ifndef BHPFIT_ALPHA_SCAN_H_
#define BHPFIT_ALPHA_SCAN_H_

#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

#include "bhpfit/bhp_dist.h"
#include "bhpfit/market_data.h"

namespace bhpfit {

// Inclusive grid min, min + step, ..., up to max.
struct AlphaGrid {
  double min = 0.4;
  double max = 0.6;
  double step = 0.01;

  std::vector<double> values() const;
};

struct ScanEntry {
  double alpha = 0.0;
  double statistic = 0.0;  // KS D
  double p_value = 0.0;
  double mean = 0.0;   // mu_alpha
  double sd = 0.0;     // sigma_alpha
  double lower = 0.0;  // L_alpha
  double upper = 0.0;  // R_alpha
};

struct ScanResult {
  Sign sign = Sign::kPositive;
  std::size_t population = 0;
  std::vector<ScanEntry> entries;  // sorted by alpha
  std::size_t best_index = 0;      // max p, ties to the smallest alpha

  const ScanEntry& best() const { return entries.at(best_index); }
  // CSV "alpha,D,p,mu,sigma,L,R".
  void write_csv(std::ostream& out) const;
};

// Normalize at `alpha`, truncate the table to [L_alpha, R_alpha] and run the
// KS test of the fluctuations against it.
ScanEntry evaluate_alpha(std::span<const double> magnitudes,
                         const BhpTable& table, double alpha);

ScanResult scan(const SignedReturns& population, const BhpTable& table,
                const AlphaGrid& grid = {});

}  // namespace bhpfit

#endif  // BHPFIT_ALPHA_SCAN_H_
