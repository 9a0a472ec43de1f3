#include "bhpfit/collapse_report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bhpfit/errors.h"
#include "bhpfit/quadrature.h"
#include "bhpfit/svg_plot.h"

namespace bhpfit {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::size_t kMaxBins = 1000;

double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const std::size_t i = static_cast<std::size_t>(std::floor(pos));
  const std::size_t j = std::min(i + 1, sorted.size() - 1);
  return sorted[i] + (pos - static_cast<double>(i)) * (sorted[j] - sorted[i]);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

std::string csv_pairs(const char* header, const std::vector<double>& x,
                      const std::vector<double>& y) {
  std::ostringstream out;
  out << header << '\n';
  char buf[64];
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", x[i], y[i]);
    out << buf;
  }
  return out.str();
}

// Numeric columns of a CSV file with one header line.
std::vector<std::vector<double>> read_columns(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  const std::size_t ncols =
      static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  std::vector<std::vector<double>> cols(ncols);
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string field;
    for (std::size_t c = 0; c < ncols; ++c) {
      if (!std::getline(fields, field, ',')) {
        throw ParseError("short row in " + path.string(), row);
      }
      try {
        cols[c].push_back(std::stod(field));
      } catch (const std::exception&) {
        throw ParseError("non-numeric field in " + path.string(), row);
      }
    }
  }
  return cols;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = i + 1 == n ? hi
                        : lo + (hi - lo) * static_cast<double>(i) /
                                   static_cast<double>(n - 1);
  }
  return out;
}

json figure(const char* id, std::vector<std::string> csv, const char* svg) {
  return json{{"id", id}, {"csv", std::move(csv)}, {"svg", svg}};
}

}  // namespace

double Histogram::area() const {
  double a = 0.0;
  for (std::size_t i = 0; i < densities.size(); ++i) {
    a += densities[i] * (edges[i + 1] - edges[i]);
  }
  return a;
}

void Histogram::write_csv(std::ostream& out) const {
  out << "lower,upper,center,count,density\n";
  char buf[160];
  for (std::size_t i = 0; i < densities.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%zu,%.17g\n", edges[i],
                  edges[i + 1], 0.5 * (edges[i] + edges[i + 1]), counts[i],
                  densities[i]);
    out << buf;
  }
}

std::size_t freedman_diaconis_bins(std::span<const double> values,
                                   double lower, double upper) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  const double iqr =
      quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  std::size_t bins = 0;
  if (iqr > 0.0) {
    const double width = 2.0 * iqr / std::cbrt(n);
    bins = static_cast<std::size_t>(std::ceil((upper - lower) / width));
  } else {
    // Sturges when the quartiles coincide.
    bins = static_cast<std::size_t>(std::ceil(std::log2(n))) + 1;
  }
  return std::clamp<std::size_t>(bins, 1, kMaxBins);
}

Histogram histogram(std::span<const double> values, double lower,
                    double upper, const BinSpec& bins) {
  if (values.empty()) throw NumericError("histogram of an empty set");
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  if (*mn == *mx) {
    throw NumericError("histogram needs at least two distinct values");
  }
  if (!(lower < upper)) throw std::invalid_argument("empty histogram range");
  const std::size_t nbins =
      bins.bins ? *bins.bins : freedman_diaconis_bins(values, lower, upper);
  if (nbins == 0) throw std::invalid_argument("bin count must be positive");

  Histogram h;
  h.edges = linspace(lower, upper, nbins + 1);
  h.counts.assign(nbins, 0);
  const double width = (upper - lower) / static_cast<double>(nbins);
  std::size_t inside = 0;
  for (double v : values) {
    if (v < lower || v > upper) continue;
    auto b = static_cast<std::size_t>((v - lower) / width);
    b = std::min(b, nbins - 1);
    // Guard against rounding placing v just outside its bin.
    while (b > 0 && v < h.edges[b]) --b;
    while (b + 1 < nbins && v >= h.edges[b + 1]) ++b;
    ++h.counts[b];
    ++inside;
  }
  if (inside == 0) throw NumericError("no values inside the histogram range");
  h.densities.resize(nbins);
  for (std::size_t i = 0; i < nbins; ++i) {
    h.densities[i] = static_cast<double>(h.counts[i]) /
                     (static_cast<double>(inside) * (h.edges[i + 1] - h.edges[i]));
  }
  return h;
}

Histogram histogram(const FluctuationSet& set, const BinSpec& bins) {
  return histogram(set.values, set.lower, set.upper, bins);
}

ReturnPdf::ReturnPdf(double alpha, double mean, double sd, double lower,
                     double upper, const BhpTable& table, Sign sign)
    : table_(&table) {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw std::invalid_argument("alpha must lie in (0, 2]");
  }
  if (!(sd > 0.0)) throw std::invalid_argument("sigma must be positive");
  const TruncatedDist truncated = truncate(table, lower, upper);
  spec_.sign = sign;
  spec_.alpha = alpha;
  spec_.mean = mean;
  spec_.sd = sd;
  spec_.lower = lower;
  spec_.upper = upper;
  spec_.mass = truncated.mass();
  spec_.lead = alpha / (sd * spec_.mass);
  spec_.scale = 1.0 / sd;
  spec_.shift = mean / sd;
  const double lo_arg = sd * lower + mean;
  const double hi_arg = sd * upper + mean;
  if (!(hi_arg > 0.0)) {
    throw NumericError("return pdf support is empty");
  }
  spec_.support_lower = lo_arg > 0.0 ? std::pow(lo_arg, 1.0 / alpha) : 0.0;
  spec_.support_upper = std::pow(hi_arg, 1.0 / alpha);
}

double ReturnPdf::operator()(double x) const {
  if (!(x > 0.0) || x < spec_.support_lower || x > spec_.support_upper) {
    return 0.0;
  }
  const double y = spec_.scale * std::pow(x, spec_.alpha) - spec_.shift;
  return spec_.lead * std::pow(x, spec_.alpha - 1.0) * table_->pdf(y);
}

double ReturnPdf::integral() const {
  // x = s^q with q = 2 / alpha keeps the integrand bounded at x = 0.
  const double q = 2.0 / spec_.alpha;
  const double s_lo = std::pow(spec_.support_lower, 1.0 / q);
  const double s_hi = std::pow(spec_.support_upper, 1.0 / q);
  static const GaussLegendreRule rule = gauss_legendre(8);
  return integrate_panels(
      [&](double s) {
        const double x = std::pow(s, q);
        return (*this)(x) * q * std::pow(s, q - 1.0);
      },
      s_lo, s_hi, 4000, rule);
}

SignAnalysis analyze_sign(const SignedReturns& population,
                          const BhpTable& table, const AlphaGrid& grid,
                          const BinSpec& bins) {
  SignAnalysis a;
  a.population = population;
  a.scan = scan(population, table, grid);
  const double alpha = a.scan.best().alpha;
  a.fluctuations = normalize(population, alpha);
  const auto& f = a.fluctuations;
  const TruncatedDist model = truncate(table, f.lower, f.upper);
  const CdfFunction cdf = [&](double x) { return model.cdf(x); };
  a.ks = ks_test(f.values, cdf);
  a.distance = distance_curve(f.values, cdf, f.lower, f.upper,
                              kDistanceCurvePoints);
  a.fluctuation_histogram = histogram(f, bins);
  const ReturnPdf pdf(alpha, f.mean, f.sd, f.lower, f.upper, table,
                      population.sign);
  a.return_pdf = pdf.spec();
  const auto [mn, mx] = std::minmax_element(population.magnitudes.begin(),
                                            population.magnitudes.end());
  a.return_histogram = histogram(population.magnitudes, *mn, *mx, bins);
  return a;
}

json summary_json(const ReportInputs& in) {
  if (in.table == nullptr) throw std::invalid_argument("report needs a table");
  const BhpTable& t = *in.table;
  json j;
  j["tool"] = {{"name", "bhpfit"}, {"version", BHPFIT_VERSION}};
  j["input"] = {{"name", in.input_name},
                {"sha256", in.input_digest},
                {"observations", in.observations},
                {"returns", in.returns},
                {"zero_returns", in.zero_returns}};
  j["table"] = {
      {"lattice", t.spectrum().side},
      {"sites", t.spectrum().sites},
      {"eigenvalues", t.spectrum().eigenvalues.size()},
      {"spectrum", kSpectrumFormula},
      {"orientation", orientation_name(t.orientation())},
      {"grid", {{"lower", t.grid().lower}, {"upper", t.grid().upper},
                {"step", t.grid().step}}},
      {"quadrature", {{"panel_width", t.quadrature().panel_width},
                      {"order", t.quadrature().order},
                      {"envelope_cutoff", t.quadrature().envelope_cutoff},
                      {"extent_scale", t.quadrature().extent_scale}}},
      {"x_max", t.x_max()},
      {"normalization_defect", t.normalization_defect()},
      {"mean", t.mean()},
      {"variance", t.variance()}};
  j["scan"] = {{"alpha_min", in.grid.min},
               {"alpha_max", in.grid.max},
               {"alpha_step", in.grid.step}};
  j["bins"] = in.bins.bins ? json(*in.bins.bins) : json("freedman-diaconis");

  for (const auto& a : in.signs) {
    const auto& best = a.scan.best();
    const auto& r = a.return_pdf;
    json s;
    s["count"] = a.population.count();
    s["fraction"] = a.population.fraction();
    s["alpha"] = best.alpha;
    s["p_value"] = best.p_value;
    s["ks_statistic"] = best.statistic;
    s["mean"] = best.mean;
    s["sd"] = best.sd;
    s["lower"] = best.lower;
    s["upper"] = best.upper;
    s["truncated_mass"] = r.mass;
    s["distance_curve_max"] = a.distance.max();
    s["ks_asymptotics_reliable"] = a.population.count() >= 35;
    s["return_pdf"] = {{"A", r.lead},
                       {"B", r.scale},
                       {"C", r.shift},
                       {"alpha_over_sigma", r.alpha / r.sd},
                       {"lead_formula", "alpha/(sigma*truncated_mass)"},
                       {"support", {r.support_lower, r.support_upper}}};
    s["histogram_bins"] = {{"fluctuations", a.fluctuation_histogram.densities.size()},
                           {"returns", a.return_histogram.densities.size()}};
    s["figures"] = json::array(
        {figure("pcurve", {"pcurve.csv"}, "pcurve.svg"),
         figure("dmap", {"dmap.csv"}, "dmap.svg"),
         figure("fluct_semilog", {"hist_fluct.csv", "overlay_fluct.csv"},
                "fluct_semilog.svg"),
         figure("fluct_linear", {"hist_fluct.csv", "overlay_fluct.csv"},
                "fluct_linear.svg"),
         figure("returns_semilog", {"hist_ret.csv", "overlay_ret.csv"},
                "returns_semilog.svg"),
         figure("returns_linear", {"hist_ret.csv", "overlay_ret.csv"},
                "returns_linear.svg")});
    j[sign_name(a.population.sign)] = std::move(s);
  }
  for (const auto& [key, value] : in.extra.items()) j[key] = value;
  return j;
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

void emit_report(const fs::path& out, const ReportInputs& in, bool svg) {
  if (in.signs.empty()) {
    throw std::invalid_argument("report needs at least one analysed sign");
  }
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) {
    throw IoError("cannot create output directory " + out.string());
  }
  const json summary = summary_json(in);
  for (const auto& a : in.signs) {
    const fs::path dir = out / sign_tag(a.population.sign);
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string());

    std::ostringstream pcurve;
    a.scan.write_csv(pcurve);
    write_text(dir / "pcurve.csv", pcurve.str());

    std::ostringstream dmap;
    a.distance.write_csv(dmap);
    write_text(dir / "dmap.csv", dmap.str());

    std::ostringstream hist;
    a.fluctuation_histogram.write_csv(hist);
    write_text(dir / "hist_fluct.csv", hist.str());

    const auto& f = a.fluctuations;
    const TruncatedDist model = truncate(*in.table, f.lower, f.upper);
    const auto xs = linspace(f.lower, f.upper, kOverlayPoints);
    std::vector<double> ys(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = model.pdf(xs[i]);
    write_text(dir / "overlay_fluct.csv", csv_pairs("x,pdf", xs, ys));

    std::ostringstream hist_ret;
    a.return_histogram.write_csv(hist_ret);
    write_text(dir / "hist_ret.csv", hist_ret.str());

    const auto& r = a.return_pdf;
    const ReturnPdf pdf(r.alpha, r.mean, r.sd, r.lower, r.upper, *in.table,
                        r.sign);
    const auto rx = linspace(r.support_lower, r.support_upper, kOverlayPoints);
    std::vector<double> ry(rx.size());
    for (std::size_t i = 0; i < rx.size(); ++i) ry[i] = pdf(rx[i]);
    write_text(dir / "overlay_ret.csv", csv_pairs("x,pdf", rx, ry));

    if (svg) render_figures(dir, a.population.sign);
  }
  write_text(out / "summary.json", dump_json(summary));
}

void render_figures(const fs::path& dir, Sign sign) {
  const std::string tag = std::string(" (") + sign_name(sign) + ")";
  const auto pcurve = read_columns(dir / "pcurve.csv");
  const auto dmap = read_columns(dir / "dmap.csv");
  const auto hist = read_columns(dir / "hist_fluct.csv");
  const auto overlay = read_columns(dir / "overlay_fluct.csv");
  const auto hist_ret = read_columns(dir / "hist_ret.csv");
  const auto overlay_ret = read_columns(dir / "overlay_ret.csv");
  if (pcurve.size() < 3 || dmap.size() < 2 || hist.size() < 5 ||
      overlay.size() < 2 || hist_ret.size() < 5 || overlay_ret.size() < 2) {
    throw ParseError("unexpected report CSV layout in " + dir.string());
  }

  auto edges = [](const std::vector<std::vector<double>>& h) {
    std::vector<double> e = h[0];
    if (!h[1].empty()) e.push_back(h[1].back());
    return e;
  };
  using Style = PlotSeries::Style;
  const std::string data_color = "#555555";
  const std::string model_color = "#d62728";

  write_text(dir / "pcurve.svg",
             render_svg({"KS p-value vs alpha" + tag, "alpha", "p-value"},
                        {{"", pcurve[0], pcurve[2], Style::kLine},
                         {"", pcurve[0], pcurve[2], Style::kMarkers}}));
  write_text(dir / "dmap.svg",
             render_svg({"|F_emp - F_model|" + tag, "fluctuation", "D(x)"},
                        {{"", dmap[0], dmap[1], Style::kLine}}));
  const std::vector<PlotSeries> fluct = {
      {"histogram", edges(hist), hist[4], Style::kStep, data_color},
      {"truncated BHP", overlay[0], overlay[1], Style::kLine, model_color}};
  write_text(dir / "fluct_semilog.svg",
             render_svg({"alpha fluctuations" + tag, "fluctuation", "density",
                         true},
                        fluct));
  write_text(dir / "fluct_linear.svg",
             render_svg({"alpha fluctuations" + tag, "fluctuation", "density"},
                        fluct));
  const std::vector<PlotSeries> ret = {
      {"histogram", edges(hist_ret), hist_ret[4], Style::kStep, data_color},
      {"return pdf", overlay_ret[0], overlay_ret[1], Style::kLine,
       model_color}};
  write_text(dir / "returns_semilog.svg",
             render_svg({"return magnitudes" + tag, "|r|", "density", true},
                        ret));
  write_text(dir / "returns_linear.svg",
             render_svg({"return magnitudes" + tag, "|r|", "density"}, ret));
}

}  // namespace bhpfit
