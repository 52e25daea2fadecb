// Error taxonomy shared by the library and the command line tool.
// The three categories map one-to-one onto CLI exit codes.
#pragma once

#include <stdexcept>
#include <string>

namespace excerptlab {

// Invalid configuration: bad flag values, out-of-domain model parameters,
// unsupported hyperparameter combinations.  CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid input data: schema violations, unparseable files, panels or
// signals that fail validation.  CLI exit code 3.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure: non-convergence, degenerate systems.  CLI exit code 4.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// WAV parsing failures carry a machine-checkable reason.
enum class WavErrorKind { BadHeader, UnsupportedFormat, TruncatedData };

class WavParseError : public DataError {
 public:
  WavParseError(WavErrorKind kind, const std::string& msg)
      : DataError(msg), kind_(kind) {}
  WavErrorKind kind() const { return kind_; }

 private:
  WavErrorKind kind_;
};

}  // namespace excerptlab
