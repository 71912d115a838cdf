#pragma once

#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace pnr {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical or physical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Operands whose shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Caller broke a documented precondition that is not a plain domain check.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Bias voltage at or beyond electrostatic pull-in.
class InstabilityError : public Error {
 public:
  InstabilityError(const std::string& what, double pull_in_voltage)
      : Error(what), pull_in_voltage_(pull_in_voltage) {}
  double pull_in_voltage() const noexcept { return pull_in_voltage_; }

 private:
  double pull_in_voltage_;
};

/// Steady-state or linear-algebra failure.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual = -1.0)
      : Error(what), residual_(residual) {}
  /// Residual norm at failure, negative when not available.
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Configuration schema violation. `field()` names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

using WarningHandler = std::function<void(std::string_view)>;

inline WarningHandler& warning_handler() {
  static WarningHandler handler = [](std::string_view msg) {
    std::cerr << "warning: " << msg << '\n';
  };
  return handler;
}

inline void warn(std::string_view msg) {
  if (auto& handler = warning_handler()) handler(msg);
}

/// Installs a handler for the lifetime of the guard, restoring the previous one after.
class ScopedWarningHandler {
 public:
  explicit ScopedWarningHandler(WarningHandler handler)
      : previous_(std::exchange(warning_handler(), std::move(handler))) {}
  ~ScopedWarningHandler() { warning_handler() = std::move(previous_); }
  ScopedWarningHandler(const ScopedWarningHandler&) = delete;
  ScopedWarningHandler& operator=(const ScopedWarningHandler&) = delete;

 private:
  WarningHandler previous_;
};

}  // namespace pnr
