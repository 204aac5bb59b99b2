#ifndef SPARSE_POLYAK_ERRORS_H_
#define SPARSE_POLYAK_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sparse_polyak {

// Invalid argument: shape mismatch, out-of-range budget, bad rule parameter.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A NaN/Inf appeared in an input, an objective value or an iterate.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative routine hit its iteration cap.
class ConvergenceError : public NumericError {
 public:
  ConvergenceError(const std::string& what, std::size_t iterations)
      : NumericError(what + " (after " + std::to_string(iterations) + " iterations)"),
        iterations_(iterations) {}

  std::size_t iterations() const noexcept { return iterations_; }

 private:
  std::size_t iterations_;
};

// Malformed or missing configuration entry. field() is the JSON path.
class ConfigError : public ParameterError {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : ParameterError(field + ": " + what), field_(field) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Bad cell in an input table. row() and col() are 1-based; col() is 0 when
// the problem concerns the whole row.
class DataError : public ParameterError {
 public:
  DataError(const std::string& source, std::size_t row, std::size_t col, const std::string& what)
      : ParameterError(source + ":" + std::to_string(row) +
                       (col ? ":" + std::to_string(col) : std::string()) + ": " + what),
        row_(row),
        col_(col) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sparse_polyak

#endif  // SPARSE_POLYAK_ERRORS_H_
