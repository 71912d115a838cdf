#pragma once

#include <compare>

#include "pnr/constants.hpp"

namespace pnr {

/// An energy, stored as the equivalent angular frequency E/hbar.
///
/// Hamiltonians are assembled in angular-frequency units (hbar = 1), which is
/// also how normalized parameter sets are written. SI callers go through
/// joules() / from_joules().
class Energy {
 public:
  constexpr Energy() = default;

  static constexpr Energy angular(double omega) { return Energy(omega); }
  static constexpr Energy from_joules(double joules) { return Energy(joules / constants::hbar); }
  /// Energy h*f for a cyclic frequency f in Hz.
  static constexpr Energy from_hertz(double f) { return Energy(2.0 * constants::pi * f); }

  constexpr double angular() const { return omega_; }
  constexpr double joules() const { return omega_ * constants::hbar; }
  constexpr double hertz() const { return omega_ / (2.0 * constants::pi); }

  constexpr Energy operator-() const { return Energy(-omega_); }
  constexpr Energy operator+(Energy o) const { return Energy(omega_ + o.omega_); }
  constexpr Energy operator-(Energy o) const { return Energy(omega_ - o.omega_); }
  constexpr Energy operator*(double s) const { return Energy(omega_ * s); }
  constexpr Energy operator/(double s) const { return Energy(omega_ / s); }
  constexpr double operator/(Energy o) const { return omega_ / o.omega_; }
  friend constexpr Energy operator*(double s, Energy e) { return e * s; }
  constexpr auto operator<=>(const Energy&) const = default;

 private:
  constexpr explicit Energy(double omega) : omega_(omega) {}
  double omega_ = 0.0;
};

}  // namespace pnr
