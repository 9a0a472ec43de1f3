#include "bhpfit/cli.h"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "bhpfit/bhp_cache.h"
#include "bhpfit/errors.h"
#include "bhpfit/synthetic.h"

namespace bhpfit {
namespace fs = std::filesystem;
namespace {

// Boolean flags accepted in config files as "key = true".
const std::set<std::string> kConfigFlags = {"no-svg", "skip-missing"};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Turns "key = value" lines into "--key=value" tokens.
std::vector<std::string> config_tokens(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    const std::string t = trim(line.substr(0, line.find('#')));
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config line is not 'key = value'", row);
    }
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    while (!key.empty() && key.front() == '-') key.erase(0, 1);
    if (key.empty()) throw ParseError("config line has an empty key", row);
    if (key == "config") throw ParseError("config files cannot nest", row);
    if (kConfigFlags.count(key)) {
      if (value == "true" || value == "1" || value == "yes") {
        tokens.push_back("--" + key);
      } else if (value != "false" && value != "0" && value != "no") {
        throw ParseError("flag '" + key + "' needs true or false", row);
      }
      continue;
    }
    tokens.push_back("--" + key + "=" + value);
  }
  return tokens;
}

// Config values go right after the subcommand so explicit flags, parsed
// later with a take-last policy, override them.
std::vector<std::string> expand_config(std::vector<std::string> args,
                                       const std::set<std::string>& commands) {
  std::string config;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config = args[i].substr(9);
  }
  if (config.empty()) return args;
  const auto tokens = config_tokens(config);
  auto cmd = std::find_if(args.begin() + 1, args.end(), [&](const std::string& a) {
    return commands.count(a) > 0;
  });
  if (cmd == args.end()) return args;
  args.insert(cmd + 1, tokens.begin(), tokens.end());
  return args;
}

BinSpec parse_bins(const std::string& text) {
  if (text == "fd" || text == "freedman-diaconis") return {};
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || v <= 0) {
    throw std::invalid_argument("--bins must be 'fd' or a positive integer");
  }
  return {static_cast<std::size_t>(v)};
}

AlphaGrid alpha_grid(const RunConfig& c) {
  if (!(c.alpha_min > 0.0 && c.alpha_max <= 2.0 && c.alpha_min < c.alpha_max &&
        c.alpha_step > 0.0)) {
    throw std::invalid_argument(
        "alpha range must satisfy 0 < min < max <= 2 with step > 0");
  }
  return {c.alpha_min, c.alpha_max, c.alpha_step};
}

std::string num(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

CachedTable obtain_table(const RunConfig& c, std::ostream& log) {
  const Orientation orientation = parse_orientation(c.orientation);
  const auto start = std::chrono::steady_clock::now();
  CachedTable cached =
      load_or_build_table(default_cache_dir(), c.lattice, orientation);
  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  log << "table: " << cached.path.string() << " ("
      << (cached.from_cache ? "cache hit" : "built") << ", " << num(secs, "%.2f")
      << " s)\n";
  return cached;
}

void add_analysis_options(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--out", c.out, "Output directory for the report bundle")
      ->capture_default_str();
  cmd->add_option("--alpha-min", c.alpha_min, "Smallest alpha of the scan grid")
      ->capture_default_str();
  cmd->add_option("--alpha-max", c.alpha_max, "Largest alpha of the scan grid")
      ->capture_default_str();
  cmd->add_option("--alpha-step", c.alpha_step, "Scan grid spacing")
      ->capture_default_str();
  cmd->add_option("--lattice", c.lattice, "Lattice side L (N = L^2 sites)")
      ->check(CLI::Range(2, 64))
      ->capture_default_str();
  cmd->add_option("--orientation", c.orientation,
                  "Side of the long exponential tail")
      ->check(CLI::IsMember({"right-skew", "left-skew"}))
      ->capture_default_str();
  cmd->add_option("--sign", c.sign, "Return populations to analyse")
      ->check(CLI::IsMember({"pos", "neg", "both"}))
      ->capture_default_str();
  cmd->add_option("--bins", c.bins,
                  "Histogram bins: 'fd' (Freedman-Diaconis) or a count")
      ->capture_default_str();
  cmd->add_flag("--no-svg", [&c](std::int64_t) { c.svg = false; },
                "Skip the SVG figures (CSV output only)");
  cmd->add_option("--config", "Key = value file; command-line flags win");
}

int run_table(const RunConfig& c, std::ostream& out) {
  const CachedTable cached = obtain_table(c, out);
  const BhpTable& t = cached.table;
  out << "lattice L=" << t.spectrum().side << " N=" << t.spectrum().sites
      << " eigenvalues=" << t.spectrum().eigenvalues.size()
      << " spectrum=" << kSpectrumFormula << "\n"
      << "orientation=" << orientation_name(t.orientation())
      << " grid=[" << num(t.grid().lower) << ", " << num(t.grid().upper)
      << "] step=" << num(t.grid().step) << "\n"
      << "x_max=" << num(t.x_max()) << " normalization_defect="
      << num(t.normalization_defect(), "%.3e") << " mean="
      << num(t.mean(), "%.3e") << " variance=" << num(t.variance(), "%.9f")
      << "\n";
  return kExitOk;
}

void print_summary(const ReportInputs& r, std::ostream& out) {
  for (const auto& a : r.signs) {
    const auto& b = a.scan.best();
    out << sign_name(a.population.sign) << ": n=" << a.population.count()
        << " alpha*=" << num(b.alpha, "%.2f") << " p*=" << num(b.p_value, "%.4f")
        << " D*=" << num(b.statistic, "%.5f") << " mu=" << num(b.mean)
        << " sigma=" << num(b.sd) << " L=" << num(b.lower)
        << " R=" << num(b.upper) << " A=" << num(a.return_pdf.lead)
        << " B=" << num(a.return_pdf.scale) << " C=" << num(a.return_pdf.shift)
        << "\n";
  }
}

int run_analyze(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const std::string bytes = read_file(c.input);
  std::istringstream in(bytes);
  const PriceSeries prices = parse_prices(in, c.format);
  const CachedTable cached = obtain_table(c, out);
  ReportInputs report = analyze_prices(prices, cached.table, c, err);
  report.input_name = fs::path(c.input).filename().string();
  report.input_digest = sha256_hex(bytes);
  emit_report(c.out, report, c.svg);
  print_summary(report, out);
  out << "report: " << c.out << "\n";
  return kExitOk;
}

int run_synthetic(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.size < 4) throw std::invalid_argument("--size must be at least 4");
  if (!(c.true_alpha > 0.0 && c.true_alpha <= 2.0)) {
    throw std::invalid_argument("--true-alpha must lie in (0, 2]");
  }
  const CachedTable cached = obtain_table(c, out);
  SyntheticSpec spec;
  spec.seed = c.seed;
  spec.size = c.size;
  spec.alpha = c.true_alpha;
  const std::string csv = prices_to_csv(synthetic_prices(cached.table, spec));

  std::error_code ec;
  fs::create_directories(c.out, ec);
  {
    std::ofstream f(fs::path(c.out) / "prices.csv", std::ios::binary);
    if (!f || !(f << csv)) throw IoError("cannot write synthetic prices");
  }
  std::istringstream in(csv);
  const PriceSeries prices = parse_prices(in);
  ReportInputs report = analyze_prices(prices, cached.table, c, err);
  report.input_name = "prices.csv";
  report.input_digest = sha256_hex(csv);
  report.extra["synthetic"] = {{"seed", spec.seed},
                               {"size", spec.size},
                               {"alpha", spec.alpha},
                               {"mean", spec.mean},
                               {"sd", spec.sd},
                               {"lower_bound",
                                synthetic_lower_bound(cached.table, spec.mean,
                                                      spec.sd)}};
  emit_report(c.out, report, c.svg);
  print_summary(report, out);
  out << "report: " << c.out << "\n";
  return kExitOk;
}

int run_report(const RunConfig& c, std::ostream& out) {
  int rendered = 0;
  for (Sign s : {Sign::kPositive, Sign::kNegative}) {
    const fs::path dir = fs::path(c.out) / sign_tag(s);
    if (!fs::exists(dir / "pcurve.csv")) continue;
    render_figures(dir, s);
    out << "rendered " << dir.string() << "\n";
    ++rendered;
  }
  if (rendered == 0) {
    throw IoError("no report CSVs found under " + c.out);
  }
  return kExitOk;
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof(buf), "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::string prices_to_csv(const PriceSeries& prices) {
  std::string out = "Date,Adj Close\n";
  char buf[64];
  for (const auto& o : prices.observations()) {
    std::snprintf(buf, sizeof(buf), ",%.17g\n", o.close);
    out += format_date(o.date);
    out += buf;
  }
  return out;
}

ReportInputs analyze_prices(const PriceSeries& prices, const BhpTable& table,
                            const RunConfig& config, std::ostream& log) {
  const ReturnSeries returns = compute_returns(prices);
  auto [pos, neg] = split_by_sign(returns);
  ReportInputs report;
  report.observations = prices.size();
  report.returns = returns.size();
  report.zero_returns = returns.size() - pos.count() - neg.count();
  report.table = &table;
  report.grid = alpha_grid(config);
  report.bins = parse_bins(config.bins);
  std::vector<const SignedReturns*> wanted;
  if (config.sign != "neg") wanted.push_back(&pos);
  if (config.sign != "pos") wanted.push_back(&neg);
  for (const SignedReturns* population : wanted) {
    if (population->count() < kSmallSampleWarning) {
      log << "warning: " << sign_name(population->sign) << " population has "
          << population->count()
          << " members; asymptotic KS p-values are unreliable below "
          << kSmallSampleWarning << "\n";
    }
    report.signs.push_back(
        analyze_sign(*population, table, report.grid, report.bins));
  }
  return report;
}

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out,
            std::ostream& err) {
  RunConfig c;
  CLI::App app{"Fit alpha-rescaled return fluctuations to the BHP distribution",
               "bhpfit"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", BHPFIT_VERSION);

  auto* table = app.add_subcommand("table", "Build or load the cached BHP table");
  table->add_option("--lattice", c.lattice, "Lattice side L (N = L^2 sites)")
      ->check(CLI::Range(2, 64))
      ->capture_default_str();
  table->add_option("--orientation", c.orientation,
                    "Side of the long exponential tail")
      ->check(CLI::IsMember({"right-skew", "left-skew"}))
      ->capture_default_str();
  table->add_option("--config", "Key = value file; command-line flags win");

  auto* analyze = app.add_subcommand(
      "analyze", "Scan alpha and write the data-collapse report for a price file");
  analyze->add_option("--input", c.input, "Daily price file (delimited text)")
      ->required();
  add_analysis_options(analyze, c);
  std::string delimiter = ",";
  std::string close_column;
  analyze->add_option("--delimiter", delimiter, "Field delimiter ('tab' for TAB)")
      ->capture_default_str();
  analyze->add_option("--date-column", c.format.date_column, "Date column name")
      ->capture_default_str();
  analyze->add_option("--close-column", close_column,
                      "Adjusted-close column name (default: Adj Close, Close)");
  analyze->add_option("--date-format", c.format.date_format,
                      "strftime-style date format")
      ->capture_default_str();
  analyze->add_flag("--skip-missing", c.format.skip_missing,
                    "Skip rows whose close is empty or 'null'");

  auto* synthetic = app.add_subcommand(
      "synthetic", "Generate a BHP-driven return series with known alpha and "
                   "analyse it");
  add_analysis_options(synthetic, c);
  synthetic->add_option("--seed", c.seed, "Generator seed")->capture_default_str();
  synthetic->add_option("--size", c.size, "Returns generated per sign")
      ->capture_default_str();
  synthetic->add_option("--true-alpha", c.true_alpha,
                        "Exponent used to generate the magnitudes")
      ->capture_default_str();

  auto* report = app.add_subcommand(
      "report", "Render SVG figures from the CSV files of an existing bundle");
  report->add_option("--out", c.out, "Report bundle directory")->required();

  try {
    const std::vector<std::string> args =
        expand_config(raw_args, {"table", "analyze", "synthetic", "report"});
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? kExitOk : kExitUsage;
    }
    if (delimiter == "tab" || delimiter == "\\t") delimiter = "\t";
    if (delimiter.size() != 1) {
      throw std::invalid_argument("--delimiter must be a single character");
    }
    c.format.delimiter = delimiter.front();
    if (!close_column.empty()) c.format.close_columns = {close_column};

    if (table->parsed()) return run_table(c, out);
    if (analyze->parsed()) return run_analyze(c, out, err);
    if (synthetic->parsed()) return run_synthetic(c, out, err);
    if (report->parsed()) return run_report(c, out);
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int run_cli(int argc, char** argv) {
  return run_cli(std::vector<std::string>(argv, argv + argc), std::cout,
                 std::cerr);
}

}  // namespace bhpfit
