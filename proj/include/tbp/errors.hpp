#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tbp {

// Invalid population parameters or malformed configuration.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Propensity score not bounded away from 0 and 1, or a conditional that is
// undefined because of it.
class OverlapError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

// C_b requested where its defining ratio does not exist (E[B] = 0, or the
// treat-greater-H expectation is 0). Carries the maximum-like expectation,
// which is still well defined.
class CbUndefinedError : public std::runtime_error {
public:
  CbUndefinedError(const std::string& what, double maxlike)
      : std::runtime_error(what), maxlike_(maxlike) {}
  double maxlike() const noexcept { return maxlike_; }

private:
  double maxlike_;
};

// Saturated estimation hit an occupied covariate cell containing records
// from only one treatment arm.
class SingleArmCellError : public std::runtime_error {
public:
  SingleArmCellError(const std::string& what, std::vector<std::string> cells)
      : std::runtime_error(what), cells_(std::move(cells)) {}
  const std::vector<std::string>& cells() const noexcept { return cells_; }

private:
  std::vector<std::string> cells_;
};

// CSV parse failure; row is 1-based and counts the header as row 1.
class CsvError : public std::runtime_error {
public:
  CsvError(const std::string& what, std::size_t row)
      : std::runtime_error(what + " (row " + std::to_string(row) + ")"), row_(row) {}
  std::size_t row() const noexcept { return row_; }

private:
  std::size_t row_;
};

}  // namespace tbp
