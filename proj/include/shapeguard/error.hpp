#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace shapeguard {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Interval operation outside its domain (division by an interval containing zero).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A point does not provide a value for every model variable.
class ArityError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Non-numeric or non-finite cell; row is 1-based including the header line.
class DataError : public Error {
 public:
  DataError(const std::string& what, std::size_t row, std::string column)
      : Error(what), row_(row), column_(std::move(column)) {}

  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, std::vector<double> last_iterate, double residual)
      : Error(what), last_iterate_(std::move(last_iterate)), residual_(residual) {}

  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }
  double residual() const noexcept { return residual_; }

 private:
  std::vector<double> last_iterate_;
  double residual_;
};

/// Compiled constraint rows admit no solution. The rows form an infeasibility certificate.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, std::size_t first_row, std::size_t second_row)
      : Error(what), first_row_(first_row), second_row_(second_row) {}

  std::size_t first_row() const noexcept { return first_row_; }
  std::size_t second_row() const noexcept { return second_row_; }

 private:
  std::size_t first_row_;
  std::size_t second_row_;
};

class BudgetError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DegenerateError : public Error {
 public:
  using Error::Error;
};

class GridError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace shapeguard
