#ifndef BHPFIT_CLI_H_
#define BHPFIT_CLI_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "bhpfit/alpha_scan.h"
#include "bhpfit/bhp_dist.h"
#include "bhpfit/collapse_report.h"
#include "bhpfit/market_data.h"

namespace bhpfit {

// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitParse = 3,
  kExitNumeric = 4,
  kExitIo = 5,
};

struct RunConfig {
  std::string input;
  std::string out = "bhpfit-report";
  double alpha_min = 0.4;
  double alpha_max = 0.6;
  double alpha_step = 0.01;
  int lattice = 10;
  std::string orientation = "right-skew";
  std::string sign = "both";  // pos, neg or both
  std::string bins = "fd";    // "fd" or a bin count
  std::uint64_t seed = 7;
  std::size_t size = 2500;
  double true_alpha = 0.5;
  bool svg = true;
  PriceFormat format;
};

// Below this population size the asymptotic KS p-value is flagged.
inline constexpr std::size_t kSmallSampleWarning = 35;

std::string sha256_hex(const std::string& bytes);
std::string prices_to_csv(const PriceSeries& prices);

// Runs scan and report construction for the requested signs.
ReportInputs analyze_prices(const PriceSeries& prices, const BhpTable& table,
                            const RunConfig& config, std::ostream& log);

// Entry point of the command-line tool; returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace bhpfit

#endif  // BHPFIT_CLI_H_
