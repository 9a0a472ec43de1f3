// End-to-end runs over vendor-style price files.
#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "bhpfit/cli.h"
#include "bhpfit/synthetic.h"
#include "json.hpp"
#include "test_support.h"

namespace bhpfit {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<double>> csv_columns(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> cols;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string field;
    for (std::size_t c = 0; std::getline(row, field, ','); ++c) {
      if (cols.size() <= c) cols.resize(c + 1);
      cols[c].push_back(std::stod(field));
    }
  }
  return cols;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  }
  return s;
}

// Synthetic closes in a seven-column vendor layout, with repeated closes
// (zero returns) and a few "null" holiday rows.
fs::path vendor_file(const fs::path& dir, std::size_t& zero_days) {
  SyntheticSpec spec;
  spec.seed = 31;
  spec.size = 800;
  const auto prices = synthetic_prices(testing::default_table(), spec);
  std::ostringstream out;
  out << "Date,Open,High,Low,Close,Adj Close,Volume\n";
  std::chrono::sys_days day = prices.observations().front().date;
  zero_days = 0;
  std::size_t k = 0;
  for (const auto& o : prices.observations()) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%.17g", o.close);
    out << format_date(day) << ",0,0,0,0," << buf << ",0\n";
    day += std::chrono::days{1};
    if (++k % 97 == 0) {
      out << format_date(day) << ",null,null,null,null,null,null\n";
      day += std::chrono::days{1};
      out << format_date(day) << ",0,0,0,0," << buf << ",0\n";  // flat day
      day += std::chrono::days{1};
      ++zero_days;
    }
  }
  const fs::path path = dir / "vendor.csv";
  std::ofstream(path) << out.str();
  return path;
}

TEST(Pipeline, VendorFileEndToEnd) {
  const auto dir = testing::scratch_dir("pipeline");
  std::size_t zero_days = 0;
  const auto input = vendor_file(dir, zero_days);
  std::ostringstream out, err;
  const int code = run_cli({"bhpfit", "analyze", "--input", input.string(),
                            "--out", (dir / "rep").string(), "--skip-missing"},
                           out, err);
  ASSERT_EQ(code, kExitOk) << err.str();

  const auto j = nlohmann::json::parse(slurp(dir / "rep" / "summary.json"));
  const auto& in = j["input"];
  EXPECT_EQ(in["returns"].get<std::size_t>(), 1600 + zero_days);
  EXPECT_EQ(in["zero_returns"].get<std::size_t>(), zero_days);
  EXPECT_EQ(in["observations"].get<std::size_t>(), in["returns"].get<std::size_t>() + 1);
  const auto pos = j["positive"], neg = j["negative"];
  EXPECT_EQ(pos["count"].get<std::size_t>() + neg["count"].get<std::size_t>() +
                zero_days,
            in["returns"].get<std::size_t>());
  EXPECT_NEAR(pos["fraction"].get<double>() + neg["fraction"].get<double>() +
                  static_cast<double>(zero_days) / in["returns"].get<double>(),
              1.0, 1e-12);

  for (const char* sign : {"pos", "neg"}) {
    const fs::path d = dir / "rep" / sign;
    const auto& s = j[std::string(sign) == "pos" ? "positive" : "negative"];
    EXPECT_LE(s["distance_curve_max"].get<double>(),
              s["ks_statistic"].get<double>() + 1e-12);
    EXPECT_GE(s["alpha"].get<double>(), 0.4);
    EXPECT_LE(s["alpha"].get<double>(), 0.6);

    // The overlays are normalized densities over the sample range.
    const auto fl = csv_columns(d / "overlay_fluct.csv");
    EXPECT_NEAR(trapezoid(fl[0], fl[1]), 1.0, 1e-4);
    // Return overlay follows A x^(alpha-1) f(B x^alpha - C) with the reported
    // constants.
    const auto rt = csv_columns(d / "overlay_ret.csv");
    const auto& rp = s["return_pdf"];
    const double a = s["alpha"], lead = rp["A"], b = rp["B"], c = rp["C"];
    for (std::size_t i = 1; i < rt[0].size(); i += 20) {
      const double x = rt[0][i];
      const double want = lead * std::pow(x, a - 1.0) *
                          testing::default_table().pdf(b * std::pow(x, a) - c);
      EXPECT_NEAR(rt[1][i], want, 1e-12 * want + 1e-300);
    }

    const auto pc = csv_columns(d / "pcurve.csv");
    ASSERT_EQ(pc[0].size(), 21u);
    double best = 0.0;
    for (double p : pc[2]) best = std::max(best, p);
    EXPECT_EQ(best, s["p_value"].get<double>());

    const auto hist = csv_columns(d / "hist_fluct.csv");
    double area = 0.0, count = 0.0;
    for (std::size_t i = 0; i < hist[0].size(); ++i) {
      area += (hist[1][i] - hist[0][i]) * hist[4][i];
      count += hist[3][i];
    }
    EXPECT_NEAR(area, 1.0, 1e-9);
    EXPECT_EQ(count, s["count"].get<double>());
  }
  fs::remove_all(dir);
}

}  // namespace
}  // namespace bhpfit
