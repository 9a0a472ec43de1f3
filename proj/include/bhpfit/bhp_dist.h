#ifndef BHPFIT_BHP_DIST_H_
#define BHPFIT_BHP_DIST_H_

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace bhpfit {

// Spin-wave spectrum of the L x L periodic lattice: the N - 1 nonzero
// eigenvalues of the discrete Laplacian,
//   lambda(n1, n2) = 4 - 2 cos(2 pi n1 / L) - 2 cos(2 pi n2 / L),
// over all (n1, n2) != (0, 0).
struct LatticeSpectrum {
  int side = 0;
  int sites = 0;
  std::vector<double> eigenvalues;
  // (1 / 2N^2) sum_k 1 / lambda_k^2: the variance of the unnormalized
  // fluctuation variable.
  double variance_factor = 0.0;

  struct Mode {
    double coupling;  // 1 / (N lambda)
    int multiplicity;
  };
  // Distinct eigenvalues merged with their multiplicities.
  std::vector<Mode> modes;

  // Lower end of the support of the standardized right-skew variable.
  double support_lower_bound() const;
};

inline constexpr const char* kSpectrumFormula =
    "4-2cos(2*pi*n1/L)-2cos(2*pi*n2/L)";

LatticeSpectrum lattice_eigenvalues(int side);

// Per-mode product
//   prod_k exp(-ix/(2N l_k) + (i/2) atan(x/(N l_k)) - (1/4) ln(1 + x^2/(N l_k)^2)),
// i.e. the characteristic function of the unnormalized fluctuation.
std::complex<double> characteristic_factor(double x,
                                           const LatticeSpectrum& spectrum);

// Cumulant generating function ln E[exp(z Y)] of the same variable, valid for
// Re z < N lambda_min. characteristic_factor(x) == exp(log_mgf(i x)).
std::complex<double> log_mgf(std::complex<double> z,
                             const LatticeSpectrum& spectrum);

// Which side carries the long exponential tail.
enum class Orientation { kRightSkew, kLeftSkew };

const char* orientation_name(Orientation o);
Orientation parse_orientation(const std::string& name);

struct GridSpec {
  double lower = -10.0;
  double upper = 12.0;
  double step = 0.002;

  std::size_t count() const;
  double at(std::size_t i) const { return lower + static_cast<double>(i) * step; }
};

// Inversion is done on the vertical line Re z = t through the saddle point of
// the integrand, in the standardized variable u = x * sqrt(K''(t)).
struct QuadratureSpec {
  double panel_width = 1.0;  // in u
  int order = 16;            // Gauss-Legendre nodes per panel
  double envelope_cutoff = 1e-12;
  // Integrate to extent_scale times the point where the envelope falls below
  // the cutoff.
  double extent_scale = 1.0;
};

struct DensityPoint {
  double value = 0.0;
  // Truncation bound reached on the original frequency axis.
  double x_max = 0.0;
};

// Density of the standardized (mean 0, sd 1) right-skew variable at y.
DensityPoint standardized_density(double y, const LatticeSpectrum& spectrum,
                                  const QuadratureSpec& quad = {});

// Tabulated BHP pdf/cdf on a uniform grid. Immutable once built.
class BhpTable {
 public:
  // Quadrature over every grid point; throws NumericError when the
  // trapezoid integral misses 1 by more than 1e-3.
  static BhpTable build(int side, Orientation orientation,
                        const GridSpec& grid = {},
                        const QuadratureSpec& quad = {});

  // Reassembles a table from stored rows (see bhp_cache.h).
  static BhpTable from_rows(int side, Orientation orientation,
                            const GridSpec& grid, const QuadratureSpec& quad,
                            double x_max, std::vector<double> pdf);

  double pdf(double x) const;
  double cdf(double x) const;
  // Inverse of the interpolated cdf; p in (0, 1).
  double quantile(double p) const;
  std::vector<double> sample(std::uint64_t seed, std::size_t count) const;

  const LatticeSpectrum& spectrum() const { return spectrum_; }
  Orientation orientation() const { return orientation_; }
  const GridSpec& grid() const { return grid_; }
  const QuadratureSpec& quadrature() const { return quad_; }
  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& pdf_values() const { return pdf_; }
  const std::vector<double>& cdf_values() const { return cdf_; }

  double x_max() const { return x_max_; }
  // Trapezoid integral of the pdf minus one, before the cdf is rescaled.
  double normalization_defect() const { return defect_; }
  double mean() const { return mean_; }
  double variance() const { return variance_; }
  // Peak location, refined by a parabola through the three top grid points.
  std::pair<double, double> mode() const;

 private:
  BhpTable() = default;
  void finish();
  std::size_t cell(double x) const;

  LatticeSpectrum spectrum_;
  Orientation orientation_ = Orientation::kRightSkew;
  GridSpec grid_;
  QuadratureSpec quad_;
  std::vector<double> xs_;
  std::vector<double> pdf_;
  std::vector<double> cdf_;
  double x_max_ = 0.0;
  double defect_ = 0.0;
  double mean_ = 0.0;
  double variance_ = 0.0;
};

// BHP restricted and renormalized to [lower, upper]:
//   F_T(x) = (F(x) - F(lower)) / (F(upper) - F(lower)).
// Holds a pointer to `base`, which must outlive it.
class TruncatedDist {
 public:
  TruncatedDist(const BhpTable& base, double lower, double upper);

  double pdf(double x) const;
  double cdf(double x) const;
  double quantile(double p) const;
  std::vector<double> sample(std::uint64_t seed, std::size_t count) const;

  const BhpTable& base() const { return *base_; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }
  double mass() const { return mass_; }

 private:
  const BhpTable* base_;
  double lower_;
  double upper_;
  double cdf_lower_;
  double mass_;
};

inline TruncatedDist truncate(const BhpTable& table, double lower,
                              double upper) {
  return TruncatedDist(table, lower, upper);
}

}  // namespace bhpfit

#endif  // BHPFIT_BHP_DIST_H_
