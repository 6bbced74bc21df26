#pragma once

#include <stdexcept>
#include <string>

namespace dshrink {

/// Malformed or invalid input data (bad file, non-finite cell, schema mismatch).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arguments outside the mathematical domain of an operation (e.g. p < 3 for
/// the Stein constant, sigma2 <= 0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid configuration values (tolerances, grid sizes, fold counts).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation that ran but could not produce a usable answer.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dshrink
