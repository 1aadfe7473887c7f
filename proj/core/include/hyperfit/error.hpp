#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hyperfit {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched or unsupported dimensions between inputs.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration or an instance specification that cannot be met.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A numerical operation could not produce a finite, well-defined result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed content in an input file. `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace hyperfit
