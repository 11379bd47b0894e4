#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace nimbus {

/// Process exit status the CLI maps each error family to.
enum class ExitCode : int {
  ok = 0,
  usage = 2,
  data = 3,
  calibration = 4,
};

/// Base of every error raised by the library. Carries the name of the
/// module that raised it so the CLI can print module-qualified messages.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& message, ExitCode code)
      : std::runtime_error(message), module_(std::move(module)), code_(code) {}

  const std::string& module() const noexcept { return module_; }
  ExitCode exit_code() const noexcept { return code_; }

 private:
  std::string module_;
  ExitCode code_;
};

/// Precondition violated on a numeric argument.
class DomainError : public Error {
 public:
  DomainError(std::string module, const std::string& message)
      : Error(std::move(module), message, ExitCode::data) {}
};

/// Clear-sky luminance too small for the index to be defined.
class NightError : public DomainError {
 public:
  explicit NightError(const std::string& message) : DomainError("index", message) {}
};

/// Image size does not fit the requested operation.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& message)
      : Error("luminance", message, ExitCode::data) {}
};

/// Malformed or inconsistent input data (files, series ordering).
class InputError : public Error {
 public:
  InputError(std::string module, const std::string& message)
      : Error(std::move(module), message, ExitCode::data) {}
};

/// Not enough, or degenerate, data to calibrate.
class CalibrationError : public Error {
 public:
  CalibrationError(std::string module, const std::string& message)
      : Error(std::move(module), message, ExitCode::calibration) {}
};

/// Invalid configuration or command-line usage.
class ConfigError : public Error {
 public:
  ConfigError(std::string module, const std::string& message)
      : Error(std::move(module), message, ExitCode::usage) {}
};

}  // namespace nimbus
