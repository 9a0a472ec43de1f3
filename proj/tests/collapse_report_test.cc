#include "bhpfit/collapse_report.h"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "bhpfit/errors.h"
#include "bhpfit/synthetic.h"
#include "test_support.h"

namespace bhpfit {
namespace {

namespace fs = std::filesystem;
using testing::default_table;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

SignedReturns synthetic_population(Sign sign, std::uint64_t seed,
                                   std::size_t n) {
  SignedReturns p;
  p.sign = sign;
  p.magnitudes = synthetic_magnitudes(default_table(), 0.5, 0.09, 0.045, n, seed);
  p.total_days = 2 * n;
  return p;
}

TEST(Histogram, UniformCase) {
  // Evenly spread points fill ten bins exactly.
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = (i + 0.5) / 1000.0;
  const auto h = histogram(v, 0.0, 1.0, BinSpec{10});
  ASSERT_EQ(h.densities.size(), 10u);
  for (double d : h.densities) EXPECT_NEAR(d, 1.0, 1e-12);
  EXPECT_NEAR(h.area(), 1.0, 1e-12);

  // Random draws: 10^4 per bin puts 0.2 at twenty standard deviations.
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> r(100'000);
  for (auto& x : r) x = u(rng);
  for (double d : histogram(r, 0.0, 1.0, BinSpec{10}).densities) {
    EXPECT_NEAR(d, 1.0, 0.2);
  }
}

TEST(Histogram, AreaIsOneForAnySet) {
  std::mt19937_64 rng(2);
  std::lognormal_distribution<double> d(0.0, 1.5);
  for (int k = 0; k < 30; ++k) {
    std::vector<double> v(5 + 37 * k);
    for (auto& x : v) x = d(rng);
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    const auto h = histogram(v, *mn, *mx);
    EXPECT_NEAR(h.area(), 1.0, 1e-9);
    std::size_t total = 0;
    for (auto c : h.counts) total += c;
    EXPECT_EQ(total, v.size());  // maximum lands in the closed last bin
  }
}

TEST(Histogram, EdgesAndErrors) {
  const std::vector<double> v{0.0, 0.5, 1.0, 1.0};
  const auto h = histogram(v, 0.0, 1.0, BinSpec{2});
  EXPECT_EQ(h.counts, (std::vector<std::size_t>{1, 3}));
  EXPECT_EQ(h.edges.front(), 0.0);
  EXPECT_EQ(h.edges.back(), 1.0);
  const std::vector<double> same{2.0, 2.0, 2.0};
  EXPECT_THROW(histogram(same, 0.0, 3.0), NumericError);
  EXPECT_THROW(histogram({}, 0.0, 1.0), NumericError);
  EXPECT_THROW(histogram(v, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(histogram(v, 0.0, 1.0, BinSpec{0}), std::invalid_argument);
}

TEST(Histogram, CsvLayout) {
  const std::vector<double> v{0.0, 1.0};
  std::ostringstream out;
  histogram(v, 0.0, 1.0, BinSpec{1}).write_csv(out);
  EXPECT_EQ(out.str(), "lower,upper,center,count,density\n0,1,0.5,2,1\n");
}

TEST(FreedmanDiaconis, WidthFromIqr) {
  // 0..99: IQR = 49.5, width = 99 / cbrt(100).
  std::vector<double> v(100);
  for (int i = 0; i < 100; ++i) v[i] = i;
  const double width = 2.0 * 49.5 / std::cbrt(100.0);
  EXPECT_EQ(freedman_diaconis_bins(v, 0.0, 99.0),
            static_cast<std::size_t>(std::ceil(99.0 / width)));
  // Coinciding quartiles fall back to Sturges.
  std::vector<double> spiky(64, 1.0);
  spiky.front() = 0.0;
  spiky.back() = 2.0;
  EXPECT_EQ(freedman_diaconis_bins(spiky, 0.0, 2.0), 7u);
}

TEST(FreedmanDiaconis, OverlayConsistentWithKs) {
  // Cumulative histogram mass at bin edges against the truncated model cdf.
  const auto& t = default_table();
  const auto pop = synthetic_population(Sign::kPositive, 3, 2500);
  const auto f = normalize(pop, 0.5);
  const auto h = histogram(f);
  const auto model = truncate(t, f.lower, f.upper);
  const auto ks = ks_test(f.values, [&](double x) { return model.cdf(x); });
  double cum = 0.0, worst = 0.0;
  for (std::size_t i = 0; i + 1 < h.edges.size(); ++i) {
    cum += h.densities[i] * (h.edges[i + 1] - h.edges[i]);
    worst = std::max(worst, std::abs(cum - model.cdf(h.edges[i + 1])));
  }
  EXPECT_LE(worst, ks.statistic + 2.0 / std::sqrt(2500.0));
}

struct PublishedParams {
  Sign sign;
  double alpha, mean, sd, lower, upper;
};
constexpr PublishedParams kPositive{Sign::kPositive, 0.50, 0.09, 0.045, -1.90, 5.51};
constexpr PublishedParams kNegative{Sign::kNegative, 0.48, 0.10, 0.050, -1.94, 4.45};

ReturnPdf make_pdf(const PublishedParams& p) {
  return ReturnPdf(p.alpha, p.mean, p.sd, p.lower, p.upper, default_table(),
                   p.sign);
}

TEST(ReturnPdf, SubstitutionIdentity) {
  const auto& t = default_table();
  for (const auto& p : {kPositive, kNegative}) {
    const auto pdf = make_pdf(p);
    const auto model = truncate(t, p.lower, p.upper);
    for (int i = 0; i < 50; ++i) {
      const double y = p.lower + (p.upper - p.lower) * (i + 0.5) / 50.0;
      const double base = p.sd * y + p.mean;
      const double x = std::pow(base, 1.0 / p.alpha);
      const double dxdy = p.sd / p.alpha * std::pow(base, 1.0 / p.alpha - 1.0);
      EXPECT_NEAR(pdf(x) * dxdy, model.pdf(y), 1e-9) << y;
    }
  }
}

TEST(ReturnPdf, SubstitutionIdentityRandomParameters) {
  const auto& t = default_table();
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> ua(0.2, 1.8), um(0.05, 0.2),
      us(0.01, 0.06), ul(-2.5, -0.5), ur(2.0, 8.0), uy(0.0, 1.0);
  for (int k = 0; k < 40; ++k) {
    const double a = ua(rng), mu = um(rng), sd = us(rng);
    const double lo = std::max(ul(rng), -0.99 * mu / sd), hi = ur(rng);
    const ReturnPdf pdf(a, mu, sd, lo, hi, t);
    const auto model = truncate(t, lo, hi);
    const auto& s = pdf.spec();
    EXPECT_NEAR(s.lead, a / (sd * model.mass()), 1e-12 * s.lead);
    for (int i = 0; i < 10; ++i) {
      const double y = lo + (hi - lo) * uy(rng);
      const double base = sd * y + mu;
      const double x = std::pow(base, 1.0 / a);
      const double dxdy = sd / a * std::pow(base, 1.0 / a - 1.0);
      EXPECT_NEAR(pdf(x) * dxdy, model.pdf(y), 1e-9);
    }
    EXPECT_NEAR(pdf.integral(), 1.0, 1e-3);
  }
}

TEST(ReturnPdf, IntegratesToOneForBothSigns) {
  for (const auto& p : {kPositive, kNegative}) {
    EXPECT_NEAR(make_pdf(p).integral(), 1.0, 1e-3);
  }
}

TEST(ReturnPdf, InnerConstantsFromRoundedMoments) {
  // Printed constants must lie inside the range implied by the rounding of
  // the printed mean and sd (half a unit in the last digit).
  struct Case {
    PublishedParams p;
    double mean_half, sd_half, printed_b, printed_c;
  };
  for (const auto& c : {Case{kPositive, 0.005, 0.0005, 22.2, 1.99},
                        Case{kNegative, 0.005, 0.0005, 20.12, 2.01}}) {
    double b_lo = 1e300, b_hi = -1e300, c_lo = 1e300, c_hi = -1e300;
    for (double dm : {-c.mean_half, c.mean_half}) {
      for (double ds : {-c.sd_half, c.sd_half}) {
        PublishedParams q = c.p;
        q.mean += dm;
        q.sd += ds;
        const auto s = make_pdf(q).spec();
        b_lo = std::min(b_lo, s.scale);
        b_hi = std::max(b_hi, s.scale);
        c_lo = std::min(c_lo, s.shift);
        c_hi = std::max(c_hi, s.shift);
      }
    }
    EXPECT_GE(c.printed_b, b_lo);
    EXPECT_LE(c.printed_b, b_hi);
    EXPECT_GE(c.printed_c, c_lo);
    EXPECT_LE(c.printed_c, c_hi);
  }
  const auto s = make_pdf(kPositive).spec();
  EXPECT_NEAR(s.scale, 1.0 / 0.045, 1e-12);
  EXPECT_NEAR(s.shift, 0.09 / 0.045, 1e-12);
  EXPECT_NEAR(s.scale, 22.2, 0.05);
}

TEST(ReturnPdf, SupportAndErrors) {
  const auto pdf = make_pdf(kPositive);
  const auto& s = pdf.spec();
  EXPECT_NEAR(s.support_lower, std::pow(0.045 * -1.90 + 0.09, 2.0), 1e-15);
  EXPECT_NEAR(s.support_upper, std::pow(0.045 * 5.51 + 0.09, 2.0), 1e-15);
  EXPECT_EQ(pdf(0.0), 0.0);
  EXPECT_EQ(pdf(s.support_upper * 1.01), 0.0);
  EXPECT_GT(pdf(0.5 * (s.support_lower + s.support_upper)), 0.0);
  const auto& t = default_table();
  EXPECT_THROW(ReturnPdf(0.0, 0.1, 0.05, -1, 1, t), std::invalid_argument);
  EXPECT_THROW(ReturnPdf(0.5, 0.1, 0.0, -1, 1, t), std::invalid_argument);
  EXPECT_THROW(ReturnPdf(0.5, 0.1, 0.05, 1, -1, t), std::invalid_argument);
  EXPECT_THROW(ReturnPdf(0.5, -1.0, 0.05, -2, -1, t), NumericError);
}

ReportInputs sample_report(const SignAnalysis& pos, const SignAnalysis& neg) {
  ReportInputs in;
  in.input_name = "prices.csv";
  in.input_digest = "00";
  in.observations = 5001;
  in.returns = 5000;
  in.table = &default_table();
  in.signs = {pos, neg};
  return in;
}

class ReportTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const auto& t = default_table();
    pos_ = new SignAnalysis(analyze_sign(
        synthetic_population(Sign::kPositive, 10, 1200), t, AlphaGrid{}));
    neg_ = new SignAnalysis(analyze_sign(
        synthetic_population(Sign::kNegative, 11, 1100), t, AlphaGrid{}));
  }
  static void TearDownTestSuite() {
    delete pos_;
    delete neg_;
  }
  static SignAnalysis* pos_;
  static SignAnalysis* neg_;
};
SignAnalysis* ReportTest::pos_ = nullptr;
SignAnalysis* ReportTest::neg_ = nullptr;

TEST_F(ReportTest, AnalysisIsInternallyConsistent) {
  const auto& a = *pos_;
  EXPECT_EQ(a.fluctuations.alpha, a.scan.best().alpha);
  EXPECT_EQ(a.ks.statistic, a.scan.best().statistic);
  EXPECT_NEAR(a.distance.max(), a.ks.statistic, 1e-2);
  EXPECT_EQ(a.distance.x.size(), kDistanceCurvePoints);
  EXPECT_NEAR(a.fluctuation_histogram.area(), 1.0, 1e-9);
  EXPECT_NEAR(a.return_histogram.area(), 1.0, 1e-9);
  EXPECT_EQ(a.return_pdf.alpha, a.scan.best().alpha);
  EXPECT_EQ(a.return_pdf.sign, Sign::kPositive);
}

TEST_F(ReportTest, SummaryJsonFields) {
  const auto j = summary_json(sample_report(*pos_, *neg_));
  for (const char* key : {"tool", "input", "table", "scan", "bins", "positive",
                          "negative"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["table"]["eigenvalues"], 99);
  EXPECT_EQ(j["table"]["orientation"], "right-skew");
  const auto& p = j["positive"];
  EXPECT_EQ(p["count"], 1200);
  EXPECT_EQ(p["alpha"].get<double>(), pos_->scan.best().alpha);
  EXPECT_EQ(p["figures"].size(), 6u);
  EXPECT_TRUE(p["ks_asymptotics_reliable"].get<bool>());
  EXPECT_EQ(p["return_pdf"]["A"].get<double>(), pos_->return_pdf.lead);
}

TEST_F(ReportTest, JsonRoundTripIsByteIdentical) {
  const std::string text = dump_json(summary_json(sample_report(*pos_, *neg_)));
  EXPECT_EQ(dump_json(nlohmann::json::parse(text)), text);
}

TEST_F(ReportTest, BundleLayoutAndSixFigures) {
  const auto dir = testing::scratch_dir("bundle");
  emit_report(dir, sample_report(*pos_, *neg_));
  EXPECT_TRUE(fs::exists(dir / "summary.json"));
  for (const char* sign : {"pos", "neg"}) {
    std::set<std::string> svgs;
    for (const auto& e : fs::directory_iterator(dir / sign)) {
      if (e.path().extension() == ".svg") svgs.insert(e.path().filename());
    }
    EXPECT_EQ(svgs.size(), 6u);
    for (const char* f : kFigureFiles) EXPECT_TRUE(svgs.count(f)) << f;
    for (const char* csv : {"pcurve.csv", "dmap.csv", "hist_fluct.csv",
                            "overlay_fluct.csv", "hist_ret.csv",
                            "overlay_ret.csv"}) {
      EXPECT_TRUE(fs::exists(dir / sign / csv)) << csv;
    }
    const std::string svg = slurp(dir / sign / "pcurve.svg");
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  }
  fs::remove_all(dir);
}

TEST_F(ReportTest, EmissionIsDeterministic) {
  const auto a = testing::scratch_dir("det_a");
  const auto b = testing::scratch_dir("det_b");
  emit_report(a, sample_report(*pos_, *neg_));
  emit_report(b, sample_report(*pos_, *neg_));
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    ++files;
    const auto rel = fs::relative(e.path(), a);
    EXPECT_EQ(slurp(e.path()), slurp(b / rel)) << rel;
  }
  EXPECT_EQ(files, 1u + 2u * 12u);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_F(ReportTest, RenderFiguresFromCsvOnly) {
  const auto dir = testing::scratch_dir("rerender");
  ReportInputs in = sample_report(*pos_, *neg_);
  in.signs = {*pos_};
  emit_report(dir, in, /*svg=*/false);
  EXPECT_FALSE(fs::exists(dir / "neg"));
  EXPECT_FALSE(fs::exists(dir / "pos" / "dmap.svg"));
  render_figures(dir / "pos", Sign::kPositive);
  for (const char* f : kFigureFiles) EXPECT_TRUE(fs::exists(dir / "pos" / f));
  fs::remove_all(dir);
}

TEST_F(ReportTest, EmptyReportAndUnwritableTarget) {
  ReportInputs in = sample_report(*pos_, *neg_);
  in.signs.clear();
  EXPECT_THROW(emit_report("/tmp/never", in), std::invalid_argument);
  EXPECT_THROW(emit_report("/proc/bhpfit-denied", sample_report(*pos_, *neg_)),
               IoError);
}

}  // namespace
}  // namespace bhpfit
