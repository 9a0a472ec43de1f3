#include "bhpfit/market_data.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "bhpfit/errors.h"

namespace bhpfit {
namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  std::string out(s.substr(b, e - b));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') {
    out = out.substr(1, out.size() - 2);
  }
  return out;
}

std::vector<std::string> split_row(const std::string& line, char delim) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(delim, start);
    if (pos == std::string::npos) {
      fields.push_back(trim(std::string_view(line).substr(start)));
      break;
    }
    fields.push_back(trim(std::string_view(line).substr(start, pos - start)));
    start = pos + 1;
  }
  return fields;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return v;
}

bool is_missing_marker(const std::string& s) {
  const std::string l = lower(s);
  return l.empty() || l == "null" || l == "nan" || l == "na" || l == "." ||
         l == "n/a";
}

}  // namespace

std::optional<Date> parse_date(const std::string& text,
                               const std::string& format) {
  std::tm tm{};
  std::istringstream in(text);
  in >> std::get_time(&tm, format.c_str());
  if (in.fail()) return std::nullopt;
  in >> std::ws;
  if (!in.eof()) return std::nullopt;
  using namespace std::chrono;
  const year_month_day ymd{year{tm.tm_year + 1900},
                           month{static_cast<unsigned>(tm.tm_mon + 1)},
                           day{static_cast<unsigned>(tm.tm_mday)}};
  if (!ymd.ok()) return std::nullopt;
  return sys_days{ymd};
}

std::string format_date(Date date) {
  const std::chrono::year_month_day ymd{date};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

PriceSeries::PriceSeries(std::vector<PriceObservation> observations)
    : obs_(std::move(observations)) {
  for (std::size_t i = 0; i < obs_.size(); ++i) {
    if (!std::isfinite(obs_[i].close) || obs_[i].close <= 0.0) {
      throw std::invalid_argument("non-positive or non-finite price at " +
                                  format_date(obs_[i].date));
    }
    if (i > 0 && obs_[i].date <= obs_[i - 1].date) {
      throw std::invalid_argument("dates not strictly increasing at " +
                                  format_date(obs_[i].date));
    }
  }
}

std::vector<double> ReturnSeries::values() const {
  std::vector<double> v;
  v.reserve(entries_.size());
  for (const auto& e : entries_) v.push_back(e.value);
  return v;
}

const char* sign_name(Sign sign) {
  return sign == Sign::kPositive ? "positive" : "negative";
}

const char* sign_tag(Sign sign) {
  return sign == Sign::kPositive ? "pos" : "neg";
}

PriceSeries parse_prices(std::istream& in, const PriceFormat& format) {
  struct Row {
    std::size_t line;
    PriceObservation obs;
  };
  std::vector<Row> rows;
  std::optional<std::size_t> date_idx = format.date_index;
  std::optional<std::size_t> close_idx = format.close_index;
  bool first_content_row = true;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.size() >= 3 &&
        line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
      line.erase(0, 3);
    }
    if (trim(line).empty()) continue;
    const auto fields = split_row(line, format.delimiter);

    if (first_content_row) {
      first_content_row = false;
      bool header = false;
      if (format.header == HeaderMode::kPresent) {
        header = true;
      } else if (format.header == HeaderMode::kAuto) {
        // A header row has a first field that is not a date, or a field
        // that matches one of the configured column names.
        header = !parse_date(fields.front(), format.date_format).has_value();
        for (const auto& f : fields) {
          if (lower(f) == lower(format.date_column)) header = true;
        }
      }
      if (header) {
        auto find = [&](const std::string& name) -> std::optional<std::size_t> {
          for (std::size_t i = 0; i < fields.size(); ++i) {
            if (lower(fields[i]) == lower(name)) return i;
          }
          return std::nullopt;
        };
        if (!date_idx) {
          date_idx = find(format.date_column);
          if (!date_idx) {
            throw ParseError("header has no date column '" +
                                 format.date_column + "'",
                             line_no);
          }
        }
        if (!close_idx) {
          for (const auto& name : format.close_columns) {
            close_idx = find(name);
            if (close_idx) break;
          }
          if (!close_idx) {
            throw ParseError("header has no adjusted-close column", line_no);
          }
        }
        continue;
      }
      if (!date_idx) date_idx = 0;
      if (!close_idx) close_idx = 1;
    }

    if (*date_idx >= fields.size() || *close_idx >= fields.size()) {
      throw ParseError("malformed row: expected at least " +
                           std::to_string(std::max(*date_idx, *close_idx) + 1) +
                           " fields, found " + std::to_string(fields.size()),
                       line_no);
    }
    const auto date = parse_date(fields[*date_idx], format.date_format);
    if (!date) {
      throw ParseError("malformed date '" + fields[*date_idx] + "'", line_no);
    }
    const std::string& close_text = fields[*close_idx];
    if (format.skip_missing && is_missing_marker(close_text)) continue;
    const auto close = parse_number(close_text);
    if (!close) {
      throw ParseError("malformed price '" + close_text + "'", line_no);
    }
    if (!std::isfinite(*close)) {
      throw ParseError("non-finite price", line_no);
    }
    if (*close <= 0.0) {
      throw ParseError("non-positive price", line_no);
    }
    rows.push_back({line_no, {*date, *close}});
  }

  if (rows.empty()) throw ParseError("empty input: no price rows");

  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return a.obs.date < b.obs.date;
  });
  std::vector<PriceObservation> obs;
  obs.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i].obs.date == rows[i - 1].obs.date) {
      throw ParseError("duplicate date " + format_date(rows[i].obs.date),
                       rows[i].line);
    }
    obs.push_back(rows[i].obs);
  }
  return PriceSeries(std::move(obs));
}

PriceSeries load_prices(const std::filesystem::path& path,
                        const PriceFormat& format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_prices(in, format);
}

ReturnSeries compute_returns(const PriceSeries& prices) {
  const auto& obs = prices.observations();
  if (obs.size() < 2) {
    throw ParseError("price series too short: need at least 2 observations, "
                     "found " + std::to_string(obs.size()));
  }
  std::vector<ReturnEntry> entries;
  entries.reserve(obs.size() - 1);
  for (std::size_t t = 1; t < obs.size(); ++t) {
    entries.push_back(
        {obs[t].date, (obs[t].close - obs[t - 1].close) / obs[t - 1].close});
  }
  return ReturnSeries(std::move(entries));
}

PriceSeries prices_from_returns(Date first_date, double first_close,
                                const ReturnSeries& returns) {
  std::vector<PriceObservation> obs;
  obs.reserve(returns.size() + 1);
  obs.push_back({first_date, first_close});
  double close = first_close;
  for (const auto& e : returns.entries()) {
    close *= 1.0 + e.value;
    obs.push_back({e.date, close});
  }
  return PriceSeries(std::move(obs));
}

std::pair<SignedReturns, SignedReturns> split_by_sign(
    const ReturnSeries& returns) {
  SignedReturns pos{Sign::kPositive, {}, returns.size()};
  SignedReturns neg{Sign::kNegative, {}, returns.size()};
  for (const auto& e : returns.entries()) {
    if (e.value > 0.0) {
      pos.magnitudes.push_back(e.value);
    } else if (e.value < 0.0) {
      neg.magnitudes.push_back(-e.value);
    }
  }
  return {std::move(pos), std::move(neg)};
}

}  // namespace bhpfit
