#pragma once

#include <stdexcept>
#include <string>

namespace landca {

/// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or arguments (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input data that cannot be processed: malformed files, misaligned grids,
/// legend mismatches, undefined statistics (CLI exit code 3).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Malformed grid file. Carries the 1-based line number of the offending token.
class FormatError : public DataError {
 public:
  FormatError(const std::string& path, std::size_t line, const std::string& what)
      : DataError(path + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// An internal consistency check failed (CLI exit code 4).
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace landca
