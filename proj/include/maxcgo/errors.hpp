#pragma once

#include <stdexcept>
#include <string>

namespace maxcgo {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input or configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public ConfigError {
 public:
  GridMismatch() : ConfigError("fields live on different grids") {}
};

enum class NumericFailure { NonContractive, NearResonance, NoConvergence, SingularSymbol, SolverFailure };

const char* to_string(NumericFailure kind);

// Numerical breakdown (CLI exit code 3).
class NumericError : public Error {
 public:
  NumericError(NumericFailure kind, const std::string& what)
      : Error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  NumericFailure kind() const { return kind_; }

 private:
  NumericFailure kind_;
};

// File system or format problem (CLI exit code 4).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace maxcgo
