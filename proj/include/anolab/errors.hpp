#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace anolab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector arguments whose lengths disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A non-finite value where a finite one is required.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, std::size_t coordinate)
      : Error(what), coordinate_(coordinate) {}

  std::size_t coordinate() const noexcept { return coordinate_; }

 private:
  std::size_t coordinate_;
};

/// An argument outside the domain of a function (k < 1, condition < 1, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Bad configuration: unknown preset, unparsable config line, out-of-range
/// hyperparameter. `line` is 0 when the error is not tied to a config file.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, std::string key = {}, int line = 0)
      : Error(what), key_(std::move(key)), line_(line) {}

  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace anolab
