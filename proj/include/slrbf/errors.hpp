#pragma once

#include <stdexcept>
#include <string>

namespace slrbf {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct ArgumentError : Error {
  using Error::Error;
};

struct DomainError : Error {
  using Error::Error;
};

struct DataError : Error {
  using Error::Error;
};

struct ParseError : Error {
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line(line) {}
  std::size_t line;
};

struct NotPositiveDefinite : Error {
  using Error::Error;
};

struct SingularMatrix : Error {
  using Error::Error;
};

/// Non-finite value detected while time stepping.
struct NumericalBlowup : Error {
  NumericalBlowup(const std::string& what, std::size_t step) : Error(what), step(step) {}
  std::size_t step;
};

}  // namespace slrbf
