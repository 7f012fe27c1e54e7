#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gpprior {

// Base of every error raised by the library. The CLI maps subclasses onto
// exit codes (config → 2, numerical → 3, I/O → 4).
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class NumericalError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  IoError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

private:
  std::string path_;
};

class LayoutMismatch : public ConfigError {
public:
  LayoutMismatch(std::size_t expected, std::size_t actual)
      : ConfigError("hyperparameter layout mismatch: expected " + std::to_string(expected) +
                    " parameters, got " + std::to_string(actual)),
        expected_(expected), actual_(actual) {}
  std::size_t expected() const noexcept { return expected_; }
  std::size_t actual() const noexcept { return actual_; }

private:
  std::size_t expected_;
  std::size_t actual_;
};

class IndexOutOfRange : public ConfigError {
public:
  IndexOutOfRange(std::size_t index, std::size_t count)
      : ConfigError("parameter index " + std::to_string(index) + " out of range [0, " +
                    std::to_string(count) + ")") {}
};

class LengthMismatch : public ConfigError {
public:
  using ConfigError::ConfigError;
};

class NonPositiveDefinite : public NumericalError {
public:
  explicit NonPositiveDefinite(std::vector<double> jitters);
  const std::vector<double>& attempted_jitter() const noexcept { return jitters_; }

private:
  std::vector<double> jitters_;
};

class NegativeVariance : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class AllRestartsFailed : public NumericalError {
public:
  explicit AllRestartsFailed(std::vector<std::string> statuses);
  const std::vector<std::string>& statuses() const noexcept { return statuses_; }

private:
  std::vector<std::string> statuses_;
};

class DegenerateInputs : public ConfigError {
public:
  using ConfigError::ConfigError;
};

class DegenerateTargets : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class InvalidPriorAssignment : public ConfigError {
public:
  using ConfigError::ConfigError;
};

class UnknownPriorLabel : public ConfigError {
public:
  using ConfigError::ConfigError;
};

class NonStationary : public ConfigError {
public:
  using ConfigError::ConfigError;
};

}  // namespace gpprior
