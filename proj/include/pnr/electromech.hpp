#pragma once

// Equivalent circuit of a voltage-biased parallel-plate mechanical oscillator.
//
// The plate capacitance is C_d(x) = eps0 A / (d - x). A bias V0 pulls the plate
// to a static displacement x0; linearizing around it gives a capacitor C_d in
// parallel with a series L_m-C_m branch that carries the mechanical resonance.

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include "pnr/constants.hpp"
#include "pnr/errors.hpp"

namespace pnr {

struct MechanicalSpec {
  double mass = 0.0;             // kg
  double spring_constant = 0.0;  // N/m
  double plate_area = 0.0;       // m^2
  double gap = 0.0;              // m, unbiased plate separation

  void validate() const {
    if (!(mass > 0.0) || !(spring_constant > 0.0) || !(plate_area > 0.0) || !(gap > 0.0)) {
      throw DomainError("MechanicalSpec: mass, spring constant, plate area and gap must all be > 0");
    }
  }

  double unbiased_capacitance() const { return constants::epsilon0 * plate_area / gap; }
  double unbiased_frequency() const { return std::sqrt(spring_constant / mass); }

  bool operator==(const MechanicalSpec&) const = default;
};

struct EquivalentCircuit {
  double V0 = 0.0;          // V
  double x0 = 0.0;          // m, static displacement
  double rest_gap = 0.0;    // m, D = d - x0
  double C_d = 0.0;         // F
  double k_eff = 0.0;       // N/m
  double C_m = 0.0;         // F
  double L_m = 0.0;         // H, +inf when decoupled
  double Z_m = 0.0;         // Ohm, +inf when decoupled
  double omega_m_V0 = 0.0;  // rad/s
  double omega_m_0 = 0.0;   // rad/s
  double mass = 0.0;        // kg, carried for admittance evaluation
  /// V0 = 0: no motional branch (C_m = 0, L_m = inf).
  bool decoupled = false;

  /// (omega_m^V0 / omega_m^0), the softening ratio entering the coupling rate.
  double softening_ratio() const { return omega_m_V0 / omega_m_0; }
  /// V0^2 C_d^2 / D^2, the electromechanical transduction factor squared.
  double transduction() const { return V0 * V0 * C_d * C_d / (rest_gap * rest_gap); }
};

/// Bias at which the stable branch reaches x0 = d/3 and k_eff vanishes.
inline double pull_in_voltage(const MechanicalSpec& mech) {
  mech.validate();
  const double d = mech.gap;
  return std::sqrt(8.0 * mech.spring_constant * d * d * d / (27.0 * constants::epsilon0 * mech.plate_area));
}

/// Stable root of k x0 = (V0^2/2) eps0 A / (d - x0)^2 on [0, d/3].
///
/// f(x) = k x (d-x)^2 - V0^2 eps0 A / 2 is increasing and concave on [0, d/3],
/// so Newton from x = 0 climbs monotonically onto the root.
inline double static_equilibrium(const MechanicalSpec& mech, double V0) {
  mech.validate();
  const double v2 = V0 * V0;
  if (v2 == 0.0) return 0.0;
  const double v_pi = pull_in_voltage(mech);
  const double d = mech.gap;
  const double k = mech.spring_constant;
  const double load = 0.5 * v2 * constants::epsilon0 * mech.plate_area;
  if (std::abs(V0) > v_pi) {
    std::ostringstream msg;
    msg << "static_equilibrium: |V0| = " << std::abs(V0) << " V exceeds the pull-in voltage " << v_pi
        << " V (no stable equilibrium)";
    throw InstabilityError(msg.str(), v_pi);
  }
  const double x_max = d / 3.0;
  double x = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double f = k * x * (d - x) * (d - x) - load;
    const double df = k * (d - x) * (d - 3.0 * x);
    if (df <= 0.0) return x_max;
    const double step = -f / df;
    x = std::min(x + step, x_max);
    if (std::abs(step) <= 1e-15 * x || x >= x_max) break;
  }
  return x;
}

/// k_eff = k - V0^2 eps0 A / (d - x0)^3 at the static equilibrium.
inline double effective_spring_constant(const MechanicalSpec& mech, double V0) {
  const double D = mech.gap - static_equilibrium(mech, V0);
  return mech.spring_constant - V0 * V0 * constants::epsilon0 * mech.plate_area / (D * D * D);
}

inline EquivalentCircuit equivalent_circuit(const MechanicalSpec& mech, double V0) {
  mech.validate();
  EquivalentCircuit c;
  c.V0 = V0;
  c.mass = mech.mass;
  c.x0 = static_equilibrium(mech, V0);
  c.rest_gap = mech.gap - c.x0;
  c.C_d = constants::epsilon0 * mech.plate_area / c.rest_gap;
  const double D = c.rest_gap;
  c.k_eff = mech.spring_constant - V0 * V0 * constants::epsilon0 * mech.plate_area / (D * D * D);
  if (!(c.k_eff > 0.0)) {
    throw InstabilityError("equivalent_circuit: bias at pull-in, k_eff = " + std::to_string(c.k_eff),
                           pull_in_voltage(mech));
  }
  c.omega_m_V0 = std::sqrt(c.k_eff / mech.mass);
  c.omega_m_0 = mech.unbiased_frequency();
  if (V0 == 0.0) {
    c.decoupled = true;
    c.C_m = 0.0;
    c.L_m = std::numeric_limits<double>::infinity();
    c.Z_m = std::numeric_limits<double>::infinity();
    return c;
  }
  const double t = c.transduction();
  c.C_m = t / c.k_eff;
  c.L_m = mech.mass / t;
  c.Z_m = std::sqrt(c.L_m / c.C_m);
  return c;
}

/// Bias giving omega_m^V0 / omega_m^0 = ratio, i.e. k_eff = ratio^2 k.
///
/// From k_eff/k = (d - 3 x0)/(d - x0) at equilibrium.
inline double bias_for_softening(const MechanicalSpec& mech, double ratio) {
  mech.validate();
  if (!(ratio > 0.0) || !(ratio <= 1.0)) throw DomainError("bias_for_softening: ratio must be in (0, 1]");
  const double r2 = ratio * ratio;
  const double d = mech.gap;
  const double x0 = d * (1.0 - r2) / (3.0 - r2);
  return std::sqrt(2.0 * mech.spring_constant * x0 * (d - x0) * (d - x0) /
                   (constants::epsilon0 * mech.plate_area));
}

/// Bose-Einstein occupation 1/(exp(hbar omega / k_B T) - 1). T = 0 gives 0.
inline double thermal_occupation(double omega, double T) {
  if (!(omega > 0.0)) throw DomainError("thermal_occupation: omega must be > 0");
  if (T < 0.0) throw DomainError("thermal_occupation: negative temperature");
  if (T == 0.0) return 0.0;
  const double x = constants::hbar * omega / (constants::k_B * T);
  return 1.0 / std::expm1(x);
}

/// Admittance of C_d in parallel with the series L_m - C_m branch.
inline std::complex<double> network_admittance(const EquivalentCircuit& c, double omega) {
  const std::complex<double> j(0.0, 1.0);
  const std::complex<double> y_d = j * omega * c.C_d;
  if (c.decoupled) return y_d;
  return y_d + 1.0 / (1.0 / (j * omega * c.C_m) + j * omega * c.L_m);
}

/// Admittance of the linearized biased capacitor, before any circuit identification.
inline std::complex<double> electromechanical_admittance(const EquivalentCircuit& c, double omega) {
  const std::complex<double> j(0.0, 1.0);
  return j * omega * c.C_d + j * omega * c.transduction() / (c.k_eff - omega * omega * c.mass);
}

}  // namespace pnr
