#pragma once

#include <stdexcept>
#include <string>

namespace kolmofix {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error {
  ParseError(const std::string& msg, int line, int column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
        detail(msg),
        line(line),
        column(column) {}
  std::string detail;
  int line;
  int column;
};

/// Division by zero, non-finite intermediate, missing measure.
struct EvalError : Error {
  using Error::Error;
};

/// The diffusion vanishes where a backend needs it bounded below.
struct DegenerateCoefficientError : Error {
  using Error::Error;
};

struct SolverError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct MeasureError : Error {
  using Error::Error;
};

}  // namespace kolmofix
