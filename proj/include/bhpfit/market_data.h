#ifndef BHPFIT_MARKET_DATA_H_
#define BHPFIT_MARKET_DATA_H_

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace bhpfit {

using Date = std::chrono::sys_days;

// Parses `text` according to a strftime-style `format` (e.g. "%Y-%m-%d").
std::optional<Date> parse_date(const std::string& text,
                               const std::string& format = "%Y-%m-%d");
std::string format_date(Date date);

struct PriceObservation {
  Date date;
  double close;
};

// Daily adjusted closes. Dates strictly increasing, every close finite and
// positive; the constructor enforces both.
class PriceSeries {
 public:
  explicit PriceSeries(std::vector<PriceObservation> observations);

  const std::vector<PriceObservation>& observations() const { return obs_; }
  std::size_t size() const { return obs_.size(); }

 private:
  std::vector<PriceObservation> obs_;
};

struct ReturnEntry {
  Date date;
  double value;
};

// r(t) = (Y(t) - Y(t-1)) / Y(t-1), dated at day t.
class ReturnSeries {
 public:
  ReturnSeries() = default;
  explicit ReturnSeries(std::vector<ReturnEntry> entries)
      : entries_(std::move(entries)) {}

  const std::vector<ReturnEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::vector<double> values() const;

 private:
  std::vector<ReturnEntry> entries_;
};

enum class Sign { kPositive, kNegative };

// "positive" / "negative", and the short directory form "pos" / "neg".
const char* sign_name(Sign sign);
const char* sign_tag(Sign sign);

// One sign's population of strictly positive magnitudes: r for r > 0, or -r
// for r < 0. Zero returns belong to neither population.
struct SignedReturns {
  Sign sign = Sign::kPositive;
  std::vector<double> magnitudes;
  std::size_t total_days = 0;

  std::size_t count() const { return magnitudes.size(); }
  double fraction() const {
    return total_days == 0 ? 0.0
                           : static_cast<double>(count()) / total_days;
  }
};

enum class HeaderMode { kAuto, kPresent, kAbsent };

// Column layout of a delimiter-separated price file. Columns are located by
// header name when a header is present; explicit indices win over names.
struct PriceFormat {
  char delimiter = ',';
  HeaderMode header = HeaderMode::kAuto;
  std::string date_column = "Date";
  // Tried in order; the first one present in the header is used.
  std::vector<std::string> close_columns = {"Adj Close", "Adj_Close",
                                            "AdjClose", "Close"};
  std::optional<std::size_t> date_index;
  std::optional<std::size_t> close_index;
  std::string date_format = "%Y-%m-%d";
  // Skip rows whose close field is empty or a missing-value marker
  // ("null", "NaN", "NA", "."), as some quote vendors emit for holidays.
  bool skip_missing = false;
};

PriceSeries parse_prices(std::istream& in, const PriceFormat& format = {});
PriceSeries load_prices(const std::filesystem::path& path,
                        const PriceFormat& format = {});

ReturnSeries compute_returns(const PriceSeries& prices);

// Rebuilds closes from a first close and a return sequence; inverse of
// compute_returns. Dates are copied from `returns`, with `first_date` for
// the initial observation.
PriceSeries prices_from_returns(Date first_date, double first_close,
                                const ReturnSeries& returns);

std::pair<SignedReturns, SignedReturns> split_by_sign(
    const ReturnSeries& returns);

}  // namespace bhpfit

#endif  // BHPFIT_MARKET_DATA_H_
