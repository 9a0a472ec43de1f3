#ifndef BHPFIT_COLLAPSE_REPORT_H_
#define BHPFIT_COLLAPSE_REPORT_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "bhpfit/alpha_scan.h"
#include "bhpfit/bhp_dist.h"
#include "bhpfit/fluctuation.h"
#include "bhpfit/gof.h"
#include "bhpfit/market_data.h"
#include "json.hpp"

namespace bhpfit {

// Area-normalized histogram: sum(density * width) == 1.
struct Histogram {
  std::vector<double> edges;
  std::vector<std::size_t> counts;
  std::vector<double> densities;

  double area() const;
  // CSV "lower,upper,center,count,density".
  void write_csv(std::ostream& out) const;
};

// Fixed bin count, or Freedman-Diaconis when unset.
struct BinSpec {
  std::optional<std::size_t> bins;
};

std::size_t freedman_diaconis_bins(std::span<const double> values, double lower,
                                   double upper);

// Bins `values` over [lower, upper]; the last bin is closed. Throws
// NumericError when fewer than two distinct values are given.
Histogram histogram(std::span<const double> values, double lower, double upper,
                    const BinSpec& bins = {});
Histogram histogram(const FluctuationSet& set, const BinSpec& bins = {});

// Return-space density obtained from the truncated BHP law of the
// fluctuations by the change of variable y = (x^alpha - mu) / sigma:
//   f(x) = A x^(alpha - 1) f_BHP(B x^alpha - C),
//   A = alpha / (sigma dF), B = 1 / sigma, C = mu / sigma.
struct ReturnPdfSpec {
  Sign sign = Sign::kPositive;
  double alpha = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  double lower = 0.0;  // L in fluctuation units
  double upper = 0.0;  // R
  double mass = 0.0;   // F(R) - F(L)
  double lead = 0.0;   // A
  double scale = 0.0;  // B
  double shift = 0.0;  // C
  double support_lower = 0.0;
  double support_upper = 0.0;
};

class ReturnPdf {
 public:
  ReturnPdf(double alpha, double mean, double sd, double lower, double upper,
            const BhpTable& table, Sign sign = Sign::kPositive);

  double operator()(double x) const;
  const ReturnPdfSpec& spec() const { return spec_; }
  // Numeric integral over the support.
  double integral() const;

 private:
  ReturnPdfSpec spec_;
  const BhpTable* table_;
};

// Everything reported for one sign.
struct SignAnalysis {
  SignedReturns population;
  ScanResult scan;
  FluctuationSet fluctuations;  // at the selected alpha
  KsResult ks;
  DistanceCurve distance;
  Histogram fluctuation_histogram;
  Histogram return_histogram;
  ReturnPdfSpec return_pdf;
};

inline constexpr std::size_t kDistanceCurvePoints = 2001;
inline constexpr std::size_t kOverlayPoints = 801;

SignAnalysis analyze_sign(const SignedReturns& population,
                          const BhpTable& table, const AlphaGrid& grid,
                          const BinSpec& bins = {});

struct ReportInputs {
  std::string input_name;
  std::string input_digest;
  std::size_t observations = 0;
  std::size_t returns = 0;
  std::size_t zero_returns = 0;
  const BhpTable* table = nullptr;
  AlphaGrid grid;
  BinSpec bins;
  std::vector<SignAnalysis> signs;
  // Extra top-level sections, e.g. generator parameters of synthetic runs.
  nlohmann::json extra = nlohmann::json::object();
};

nlohmann::json summary_json(const ReportInputs& inputs);
std::string dump_json(const nlohmann::json& j);

// Figure files written per sign directory.
inline constexpr const char* kFigureFiles[] = {
    "pcurve.svg",         "dmap.svg",         "fluct_semilog.svg",
    "fluct_linear.svg",   "returns_semilog.svg", "returns_linear.svg"};

// Writes <out>/summary.json and <out>/{pos,neg}/*.csv, plus the SVG figures
// when `svg` is set. Throws IoError when the directory is not writable.
void emit_report(const std::filesystem::path& out, const ReportInputs& inputs,
                 bool svg = true);

// Renders the SVG figures of one sign directory from its CSV files.
void render_figures(const std::filesystem::path& sign_dir, Sign sign);

}  // namespace bhpfit

#endif  // BHPFIT_COLLAPSE_REPORT_H_
