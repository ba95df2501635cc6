#pragma once

#include <stdexcept>
#include <string>

namespace qgrom {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape or grid mismatch between operands.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration value, missing key, or violated precondition.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written, or failed validation on read.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure (non-finite data, non-convergence, rank deficiency).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& what, double time)
      : NumericalError(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class RankError : public NumericalError {
 public:
  RankError(const std::string& what, std::size_t usable)
      : NumericalError(what), usable_(usable) {}
  std::size_t usable() const noexcept { return usable_; }

 private:
  std::size_t usable_;
};

}  // namespace qgrom
