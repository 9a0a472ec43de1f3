#ifndef BHPFIT_ERRORS_H_
#define BHPFIT_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bhpfit {

// Malformed input text. `row` is the 1-based line number, 0 when the error
// is not tied to a single row.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t row = 0)
      : std::runtime_error(row == 0 ? what
                                    : "row " + std::to_string(row) + ": " + what),
        row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

// A computation could not produce a valid result (degenerate population,
// quadrature budget missed, vanishing truncation mass, ...).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem failures: unreadable input, unwritable output or cache.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bhpfit

#endif  // BHPFIT_ERRORS_H_
