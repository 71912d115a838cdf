#pragma once

#include <numbers>

namespace pnr::constants {

// CODATA 2018 (exact where the SI fixes them).
inline constexpr double pi = std::numbers::pi;
inline constexpr double epsilon0 = 8.8541878128e-12;       // F/m
inline constexpr double h = 6.62607015e-34;                // J s
inline constexpr double hbar = h / (2.0 * pi);             // J s
inline constexpr double e = 1.602176634e-19;               // C
inline constexpr double k_B = 1.380649e-23;                // J/K

/// Reduced flux quantum hbar/2e, the unit used in E_J = Phi0^2 / L_J.
inline constexpr double reduced_flux_quantum = hbar / (2.0 * e);
/// Superconducting flux quantum h/2e.
inline constexpr double flux_quantum = h / (2.0 * e);

}  // namespace pnr::constants
