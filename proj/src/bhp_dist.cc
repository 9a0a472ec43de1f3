#include "bhpfit/bhp_dist.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "bhpfit/errors.h"
#include "bhpfit/quadrature.h"
#include "bhpfit/random.h"

namespace bhpfit {
namespace {

constexpr double kDefectBudget = 1e-3;
constexpr std::size_t kMaxPanels = 200000;

// Derivatives of the cumulant generating function on the real axis.
double cgf_first(double t, const LatticeSpectrum& s) {
  double sum = 0.0;
  for (const auto& m : s.modes) {
    sum += m.multiplicity * m.coupling * m.coupling * t /
           (2.0 * (1.0 - t * m.coupling));
  }
  return sum;
}

double cgf_second(double t, const LatticeSpectrum& s) {
  double sum = 0.0;
  for (const auto& m : s.modes) {
    const double a = 1.0 - t * m.coupling;
    sum += m.multiplicity * m.coupling * m.coupling / (2.0 * a * a);
  }
  return sum;
}

// Solves K'(t) = y on t < 1 / max coupling. K' is increasing and convex, so
// Newton from the right of the root is monotone; overshoots to the right are
// caught by bisection against the bracket.
double saddle_point(double y, const LatticeSpectrum& s) {
  double max_coupling = 0.0;
  for (const auto& m : s.modes) max_coupling = std::max(max_coupling, m.coupling);
  double lo = -std::numeric_limits<double>::infinity();
  double hi = 1.0 / max_coupling;
  double t = 0.0;
  for (int iter = 0; iter < 500; ++iter) {
    const double g = cgf_first(t, s) - y;
    if (g > 0.0) {
      hi = t;
    } else {
      lo = t;
    }
    double next = t - g / cgf_second(t, s);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-13 * (1.0 + std::abs(t))) return next;
    t = next;
  }
  return t;
}

}  // namespace

double LatticeSpectrum::support_lower_bound() const {
  double sum = 0.0;
  for (const auto& m : modes) sum += m.multiplicity * m.coupling;
  return -0.5 * sum / std::sqrt(variance_factor);
}

LatticeSpectrum lattice_eigenvalues(int side) {
  if (side < 2) throw std::invalid_argument("lattice side must be >= 2");
  LatticeSpectrum s;
  s.side = side;
  s.sites = side * side;
  const double two_pi = 2.0 * std::numbers::pi;
  double inv_sq = 0.0;
  for (int n1 = 0; n1 < side; ++n1) {
    for (int n2 = 0; n2 < side; ++n2) {
      if (n1 == 0 && n2 == 0) continue;
      const double lambda = 4.0 - 2.0 * std::cos(two_pi * n1 / side) -
                            2.0 * std::cos(two_pi * n2 / side);
      s.eigenvalues.push_back(lambda);
      inv_sq += 1.0 / (lambda * lambda);
    }
  }
  const double n = s.sites;
  s.variance_factor = inv_sq / (2.0 * n * n);

  std::vector<double> sorted = s.eigenvalues;
  std::sort(sorted.begin(), sorted.end());
  for (double lambda : sorted) {
    const double coupling = 1.0 / (n * lambda);
    if (!s.modes.empty() &&
        std::abs(s.modes.back().coupling - coupling) <= 1e-12 * coupling) {
      ++s.modes.back().multiplicity;
    } else {
      s.modes.push_back({coupling, 1});
    }
  }
  return s;
}

std::complex<double> characteristic_factor(double x,
                                           const LatticeSpectrum& spectrum) {
  const double n = spectrum.sites;
  std::complex<double> exponent{0.0, 0.0};
  for (double lambda : spectrum.eigenvalues) {
    const double theta = x / (n * lambda);
    exponent += std::complex<double>(-0.25 * std::log1p(theta * theta),
                                     -0.5 * theta + 0.5 * std::atan(theta));
  }
  return std::exp(exponent);
}

std::complex<double> log_mgf(std::complex<double> z,
                             const LatticeSpectrum& spectrum) {
  std::complex<double> sum{0.0, 0.0};
  for (const auto& m : spectrum.modes) {
    sum += static_cast<double>(m.multiplicity) *
           (-0.5 * z * m.coupling - 0.5 * std::log(1.0 - z * m.coupling));
  }
  return sum;
}

const char* orientation_name(Orientation o) {
  return o == Orientation::kRightSkew ? "right-skew" : "left-skew";
}

Orientation parse_orientation(const std::string& name) {
  if (name == "right-skew" || name == "right") return Orientation::kRightSkew;
  if (name == "left-skew" || name == "left") return Orientation::kLeftSkew;
  throw std::invalid_argument("unknown orientation '" + name + "'");
}

std::size_t GridSpec::count() const {
  return static_cast<std::size_t>(std::llround((upper - lower) / step)) + 1;
}

DensityPoint standardized_density(double y, const LatticeSpectrum& spectrum,
                                  const QuadratureSpec& quad) {
  const double scale = std::sqrt(spectrum.variance_factor);
  if (y <= spectrum.support_lower_bound()) return {0.0, 0.0};
  const double target = scale * y;
  const double t = saddle_point(target, spectrum);
  const double width = std::sqrt(cgf_second(t, spectrum));

  // K(t) - t y, the log of the tilting factor.
  double log_base = -t * target;
  for (const auto& m : spectrum.modes) {
    log_base += m.multiplicity *
                (-0.5 * t * m.coupling - 0.5 * std::log1p(-t * m.coupling));
  }

  struct Tilted {
    double rate;  // coupling / (1 - t coupling)
    double coupling;
    double half_mult;
  };
  std::vector<Tilted> tilted;
  tilted.reserve(spectrum.modes.size());
  for (const auto& m : spectrum.modes) {
    tilted.push_back({m.coupling / (1.0 - t * m.coupling), m.coupling,
                      0.5 * m.multiplicity});
  }
  // Re and Im of K(t + ix) - K(t) - i x y.
  auto exponent = [&](double x) {
    double re = 0.0;
    double im = -x * target;
    for (const auto& m : tilted) {
      const double r = x * m.rate;
      re -= 0.5 * m.half_mult * std::log1p(r * r);
      im += m.half_mult * (std::atan(r) - x * m.coupling);
    }
    return std::pair{re, im};
  };

  static const GaussLegendreRule default_rule = gauss_legendre(16);
  const GaussLegendreRule custom =
      quad.order == 16 ? GaussLegendreRule{} : gauss_legendre(quad.order);
  const GaussLegendreRule& gl = quad.order == 16 ? default_rule : custom;
  const double h = quad.panel_width;
  const double log_cutoff = std::log(quad.envelope_cutoff);
  double integral = 0.0;
  double extent = std::numeric_limits<double>::infinity();
  std::size_t k = 0;
  for (; static_cast<double>(k) * h < extent; ++k) {
    if (k >= kMaxPanels) {
      throw NumericError("density quadrature did not reach the envelope cutoff");
    }
    const double mid = (static_cast<double>(k) + 0.5) * h;
    double panel = 0.0;
    for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
      const double x = (mid + 0.5 * h * gl.nodes[j]) / width;
      const auto [re, im] = exponent(x);
      panel += gl.weights[j] * std::exp(re) * std::cos(im);
    }
    integral += 0.5 * h * panel;
    if (!std::isfinite(extent)) {
      const double end = (static_cast<double>(k) + 1.0) * h;
      if (exponent(end / width).first < log_cutoff) {
        extent = quad.extent_scale * end;
      }
    }
  }

  const double value =
      scale * std::exp(log_base) * integral / (std::numbers::pi * width);
  return {std::max(value, 0.0), extent / width};
}

BhpTable BhpTable::build(int side, Orientation orientation,
                         const GridSpec& grid, const QuadratureSpec& quad) {
  if (grid.lower > -8.0 || grid.upper < 10.0 || grid.step > 0.005 ||
      grid.step <= 0.0) {
    throw std::invalid_argument(
        "table grid must cover [-8, 10] with step <= 0.005");
  }
  BhpTable table;
  table.spectrum_ = lattice_eigenvalues(side);
  table.orientation_ = orientation;
  table.grid_ = grid;
  table.quad_ = quad;
  const std::size_t n = grid.count();
  table.xs_.resize(n);
  table.pdf_.resize(n);
  std::vector<double> x_max(n, 0.0);
  const double flip = orientation == Orientation::kRightSkew ? 1.0 : -1.0;
  parallel_for(n, [&](std::size_t i) {
    table.xs_[i] = grid.at(i);
    const auto point = standardized_density(flip * table.xs_[i],
                                            table.spectrum_, quad);
    table.pdf_[i] = point.value;
    x_max[i] = point.x_max;
  });
  table.x_max_ = *std::max_element(x_max.begin(), x_max.end());
  table.finish();
  return table;
}

BhpTable BhpTable::from_rows(int side, Orientation orientation,
                             const GridSpec& grid, const QuadratureSpec& quad,
                             double x_max, std::vector<double> pdf) {
  if (pdf.size() != grid.count()) {
    throw std::invalid_argument("row count does not match the grid");
  }
  BhpTable table;
  table.spectrum_ = lattice_eigenvalues(side);
  table.orientation_ = orientation;
  table.grid_ = grid;
  table.quad_ = quad;
  table.x_max_ = x_max;
  table.xs_.resize(pdf.size());
  for (std::size_t i = 0; i < pdf.size(); ++i) table.xs_[i] = grid.at(i);
  table.pdf_ = std::move(pdf);
  table.finish();
  return table;
}

void BhpTable::finish() {
  const std::size_t n = xs_.size();
  const double h = grid_.step;
  cdf_.assign(n, 0.0);
  double first = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double a = 0.5 * h * (pdf_[i - 1] + pdf_[i]);
    cdf_[i] = cdf_[i - 1] + a;
    first += 0.5 * h * (xs_[i - 1] * pdf_[i - 1] + xs_[i] * pdf_[i]);
  }
  const double total = cdf_.back();
  defect_ = total - 1.0;
  if (!(std::abs(defect_) <= kDefectBudget)) {
    throw NumericError("BHP table normalization defect " +
                       std::to_string(defect_) + " exceeds budget 1e-3");
  }
  mean_ = first;
  double second = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double d0 = xs_[i - 1] - mean_;
    const double d1 = xs_[i] - mean_;
    second += 0.5 * h * (d0 * d0 * pdf_[i - 1] + d1 * d1 * pdf_[i]);
  }
  variance_ = second;
  for (double& c : cdf_) c /= total;
  cdf_.back() = 1.0;
}

std::size_t BhpTable::cell(double x) const {
  const double pos = std::floor((x - xs_.front()) / grid_.step);
  if (pos <= 0.0) return 0;
  return std::min(static_cast<std::size_t>(pos), xs_.size() - 2);
}

double BhpTable::pdf(double x) const {
  if (!(x >= xs_.front() && x <= xs_.back())) return 0.0;
  const std::size_t j = cell(x);
  const double w = (x - xs_[j]) / grid_.step;
  return std::max(0.0, (1.0 - w) * pdf_[j] + w * pdf_[j + 1]);
}

double BhpTable::cdf(double x) const {
  if (std::isnan(x)) return x;
  if (x <= xs_.front()) return 0.0;
  if (x >= xs_.back()) return 1.0;
  const std::size_t j = cell(x);
  const double w = std::clamp((x - xs_[j]) / grid_.step, 0.0, 1.0);
  return std::clamp((1.0 - w) * cdf_[j] + w * cdf_[j + 1], 0.0, 1.0);
}

double BhpTable::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("quantile probability must lie in (0, 1)");
  }
  const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), p);
  const std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
  const double c0 = cdf_[i - 1];
  const double c1 = cdf_[i];
  return xs_[i - 1] + (p - c0) / (c1 - c0) * (xs_[i] - xs_[i - 1]);
}

std::vector<double> BhpTable::sample(std::uint64_t seed,
                                     std::size_t count) const {
  UniformStream uniform(seed);
  std::vector<double> out(count);
  for (auto& v : out) v = quantile(uniform.next());
  return out;
}

std::pair<double, double> BhpTable::mode() const {
  const auto it = std::max_element(pdf_.begin(), pdf_.end());
  std::size_t i = static_cast<std::size_t>(it - pdf_.begin());
  if (i == 0 || i + 1 == pdf_.size()) return {xs_[i], pdf_[i]};
  const double a = pdf_[i - 1];
  const double b = pdf_[i];
  const double c = pdf_[i + 1];
  const double denom = a - 2.0 * b + c;
  if (denom >= 0.0) return {xs_[i], b};
  const double offset = 0.5 * (a - c) / denom;
  return {xs_[i] + offset * grid_.step, b - 0.25 * (a - c) * offset};
}

TruncatedDist::TruncatedDist(const BhpTable& base, double lower, double upper)
    : base_(&base), lower_(lower), upper_(upper) {
  if (!(lower < upper)) {
    throw std::invalid_argument("truncation interval is degenerate");
  }
  cdf_lower_ = base.cdf(lower);
  mass_ = base.cdf(upper) - cdf_lower_;
  if (!(mass_ >= 1e-12)) {
    throw NumericError("truncation interval carries vanishing mass");
  }
}

double TruncatedDist::pdf(double x) const {
  if (x < lower_ || x > upper_) return 0.0;
  return base_->pdf(x) / mass_;
}

double TruncatedDist::cdf(double x) const {
  if (x <= lower_) return 0.0;
  if (x >= upper_) return 1.0;
  return std::clamp((base_->cdf(x) - cdf_lower_) / mass_, 0.0, 1.0);
}

double TruncatedDist::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("quantile probability must lie in (0, 1)");
  }
  const double q = cdf_lower_ + p * mass_;
  if (q <= 0.0) return lower_;
  if (q >= 1.0) return upper_;
  return std::clamp(base_->quantile(q), lower_, upper_);
}

std::vector<double> TruncatedDist::sample(std::uint64_t seed,
                                          std::size_t count) const {
  UniformStream uniform(seed);
  std::vector<double> out(count);
  for (auto& v : out) v = quantile(uniform.next());
  return out;
}

}  // namespace bhpfit
