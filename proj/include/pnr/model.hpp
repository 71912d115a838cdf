#pragma once

// Quantized system Hamiltonians and their rotating-frame form under a weak drive.
//
// Hamiltonians are assembled in angular-frequency units: every energy is E/hbar.

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "pnr/constants.hpp"
#include "pnr/electromech.hpp"
#include "pnr/errors.hpp"
#include "pnr/operators.hpp"
#include "pnr/units.hpp"

namespace pnr {

/// One bosonic mode for simulation. `anharmonicity` is A/hbar (0 for harmonic).
struct ModeSpec {
  double omega = 0.0;
  double anharmonicity = 0.0;
  double gamma = 0.0;
  double n_th = 0.0;
  std::size_t N = 2;

  void validate(std::string_view name = "mode") const {
    const std::string n(name);
    if (!(gamma >= 0.0)) throw DomainError(n + ": gamma must be >= 0");
    if (!(n_th >= 0.0)) throw DomainError(n + ": n_th must be >= 0");
    if (N < 2) throw DomainError(n + ": truncation N must be >= 2");
    if (!std::isfinite(omega)) throw DomainError(n + ": omega must be finite");
  }

  bool operator==(const ModeSpec&) const = default;
};

/// Transmon coupled to a mechanical mode, obtained by quantizing the equivalent circuit.
struct TwoBodyParams {
  double omega_t_prime = 0.0;  // rad/s, 1/sqrt(L_J C_t)
  double omega_m_prime = 0.0;  // rad/s, renormalized mechanical frequency
  double g = 0.0;              // rad/s
  Energy A;                    // charging energy e^2 / 2 C_t
  double C_t = 0.0;
  double C_J = 0.0;
  double C_d = 0.0;
  double L_J = 0.0;
  double omega_m_0 = 0.0;
  double omega_m_V0 = 0.0;
  bool decoupled = false;

  /// g -> e transition frequency, omega_t' - A/hbar.
  double omega_t() const { return omega_t_prime - A.angular(); }
  double sigma() const { return omega_t_prime + omega_m_prime; }
  double delta() const { return omega_t_prime - omega_m_prime; }
  /// A / (hbar omega_t'); the quartic expansion holds up to 1/20.
  double transmon_limit_ratio() const { return A.angular() / omega_t_prime; }
  bool within_transmon_limit() const { return transmon_limit_ratio() <= 1.0 / 20.0 * (1.0 + 1e-12); }
};

inline TwoBodyParams quantize_two_body(const EquivalentCircuit& equiv, double C_J, double L_J) {
  if (!(C_J > 0.0) || !(L_J > 0.0)) throw DomainError("quantize_two_body: C_J and L_J must be > 0");
  if (!(equiv.C_d > 0.0) || !(equiv.omega_m_0 > 0.0)) throw DomainError("quantize_two_body: invalid circuit");
  TwoBodyParams p;
  p.C_J = C_J;
  p.C_d = equiv.C_d;
  p.C_t = C_J + equiv.C_d;
  p.L_J = L_J;
  p.omega_m_0 = equiv.omega_m_0;
  p.omega_m_V0 = equiv.omega_m_V0;
  p.omega_t_prime = 1.0 / std::sqrt(L_J * p.C_t);
  p.A = Energy::from_joules(constants::e * constants::e / (2.0 * p.C_t));
  p.decoupled = equiv.decoupled;
  if (equiv.decoupled) {
    p.omega_m_prime = equiv.omega_m_V0;
    p.g = 0.0;
    return p;
  }
  p.omega_m_prime = equiv.omega_m_V0 * std::sqrt((equiv.C_m + p.C_t) / p.C_t);
  const double r2 = std::pow(equiv.softening_ratio(), 2);
  p.g = 0.5 * std::sqrt(p.omega_m_prime * p.omega_t_prime) *
        std::sqrt((1.0 - r2) / (1.0 + (C_J / equiv.C_d) * r2));
  return p;
}

/// Coefficients of the two-body Hamiltonian, all in rad/s.
struct TwoBodyCoefficients {
  double omega_t_prime = 0.0;
  double anharmonicity = 0.0;  // A/hbar
  double omega_m_prime = 0.0;
  double g = 0.0;
};

/// Two-body system ready for simulation: transmon (mode 0), mechanics (mode 1).
/// `transmon.omega` is the bare frequency omega_t'.
struct TwoBodySystem {
  ModeSpec transmon;
  ModeSpec mechanics;
  double g = 0.0;

  TwoBodyCoefficients coefficients() const {
    return {transmon.omega, transmon.anharmonicity, mechanics.omega, g};
  }
  HilbertDims dims() const { return HilbertDims{transmon.N, mechanics.N}; }
  bool operator==(const TwoBodySystem&) const = default;
};

inline TwoBodySystem make_two_body_system(const TwoBodyParams& p, ModeSpec transmon_bath, ModeSpec mech_bath) {
  transmon_bath.omega = p.omega_t_prime;
  transmon_bath.anharmonicity = p.A.angular();
  mech_bath.omega = p.omega_m_prime;
  mech_bath.anharmonicity = 0.0;
  return {transmon_bath, mech_bath, p.g};
}

namespace detail {

/// Matrix elements of (a + a^dagger)^4 between the first N Fock states.
/// Built in N + 2 levels so that no intermediate state is cut off.
inline ComplexMatrix quartic_position(std::size_t N) {
  const ComplexMatrix a = destroy(N + 2);
  const DenseMatrix x = (a + a.adjoint()).to_dense();
  const DenseMatrix x2 = x * x;
  const DenseMatrix x4 = x2 * x2;
  const auto n = static_cast<Eigen::Index>(N);
  return ComplexMatrix(DenseMatrix(x4.topLeftCorner(n, n)));
}

inline void require_hermitian(const ComplexMatrix& H, std::string_view who) {
  if (!H.is_hermitian(1e-12)) {
    throw std::logic_error(std::string(who) + ": assembled Hamiltonian is not Hermitian");
  }
}

}  // namespace detail

/// H = w_t' a^dag a - (A/12)(a + a^dag)^4 + w_m' c^dag c - g (a - a^dag)(c - c^dag).
/// The quartic term is kept exactly as written, without normal ordering.
inline ComplexMatrix build_two_body_hamiltonian(const TwoBodyCoefficients& p, const HilbertDims& dims) {
  if (dims.modes() != 2) throw DimensionError("build_two_body_hamiltonian: expected 2 modes (transmon, mechanics)");
  const ComplexMatrix a = embed(destroy(dims[0]), 0, dims);
  const ComplexMatrix c = embed(destroy(dims[1]), 1, dims);
  const ComplexMatrix ad = a.adjoint();
  const ComplexMatrix cd = c.adjoint();
  ComplexMatrix H = p.omega_t_prime * (ad * a) + p.omega_m_prime * (cd * c) - p.g * ((a - ad) * (c - cd));
  if (p.anharmonicity != 0.0) {
    H = H - (p.anharmonicity / 12.0) * embed(detail::quartic_position(dims[0]), 0, dims);
  }
  detail::require_hermitian(H, "build_two_body_hamiltonian");
  return H;
}

inline ComplexMatrix build_two_body_hamiltonian(const TwoBodySystem& s) {
  return build_two_body_hamiltonian(s.coefficients(), s.dims());
}

/// HF electrical mode (0), LF electrical mode (1), mechanics (2). All energies in rad/s.
struct ThreeBodyParams {
  ModeSpec hf;
  ModeSpec lf;
  ModeSpec mech;
  double g = 0.0;
  double chi_LH = 0.0;

  HilbertDims dims() const { return HilbertDims{hf.N, lf.N, mech.N}; }

  /// chi_LH / (2 sqrt(A_H A_L)); nullopt unless both anharmonicities are nonzero.
  std::optional<double> crosskerr_consistency() const {
    if (hf.anharmonicity == 0.0 || lf.anharmonicity == 0.0) return std::nullopt;
    return chi_LH / (2.0 * std::sqrt(hf.anharmonicity * lf.anharmonicity));
  }

  /// Warns when chi_LH departs from 2 sqrt(A_H A_L) by more than `rel_tol`.
  bool check_crosskerr_consistency(double rel_tol = 0.01) const {
    const auto ratio = crosskerr_consistency();
    if (!ratio || std::abs(*ratio - 1.0) <= rel_tol) return true;
    std::ostringstream msg;
    msg << "three-body parameters: chi_LH = " << chi_LH << " but 2 sqrt(A_H A_L) = "
        << 2.0 * std::sqrt(hf.anharmonicity * lf.anharmonicity) << " (ratio " << *ratio << ")";
    warn(msg.str());
    return false;
  }

  bool operator==(const ThreeBodyParams&) const = default;
};

/// H = w_H a^dag a - A_H a^dag a^dag a a + w_L b^dag b - A_L b^dag b^dag b b + w_m c^dag c
///     - g (b - b^dag)(c - c^dag) - chi_LH a^dag a b^dag b
inline ComplexMatrix build_three_body_hamiltonian(const ThreeBodyParams& p, const HilbertDims& dims) {
  if (dims.modes() != 3) throw DimensionError("build_three_body_hamiltonian: expected 3 modes (HF, LF, mech)");
  const ComplexMatrix a = embed(destroy(dims[0]), 0, dims);
  const ComplexMatrix b = embed(destroy(dims[1]), 1, dims);
  const ComplexMatrix c = embed(destroy(dims[2]), 2, dims);
  const ComplexMatrix ad = a.adjoint();
  const ComplexMatrix bd = b.adjoint();
  const ComplexMatrix cd = c.adjoint();
  const ComplexMatrix na = ad * a;
  const ComplexMatrix nb = bd * b;
  ComplexMatrix H = p.hf.omega * na - p.hf.anharmonicity * (ad * ad * a * a) + p.lf.omega * nb -
                    p.lf.anharmonicity * (bd * bd * b * b) + p.mech.omega * (cd * c) - p.g * ((b - bd) * (c - cd)) -
                    p.chi_LH * (na * nb);
  detail::require_hermitian(H, "build_three_body_hamiltonian");
  return H;
}

inline ComplexMatrix build_three_body_hamiltonian(const ThreeBodyParams& p) {
  return build_three_body_hamiltonian(p, p.dims());
}

struct DriveSpec {
  std::size_t driven_mode = 0;
  double omega_d = 0.0;
  double amplitude = 0.0;  // rad/s

  /// Weak probe, amplitude = 1e-3 x the driven mode's dissipation rate.
  static DriveSpec weak_probe(std::size_t mode, const ModeSpec& spec, double omega_d = 0.0) {
    return {mode, omega_d, 1e-3 * spec.gamma};
  }
};

struct FrameOptions {
  /// Drop the parts of H that do not conserve the rotated excitation number. Those
  /// terms oscillate at ~2 omega_d in the drive frame; keeping them as static terms
  /// would make counter-rotating processes spuriously resonant.
  bool secular = true;
};

/// H + H_dr(0) - omega_d sum_{k in rotate_modes} n_k, with H_dr(0) = -i amp (a - a^dag)
/// on the driven mode.
inline ComplexMatrix rotating_frame(const ComplexMatrix& H, const DriveSpec& drive, const HilbertDims& dims,
                                    std::span<const std::size_t> rotate_modes, FrameOptions options = {}) {
  if (!H.is_square() || H.rows() != dims.total()) {
    throw DimensionError("rotating_frame: Hamiltonian " + H.shape() + " does not match total dimension " +
                         std::to_string(dims.total()));
  }
  if (std::find(rotate_modes.begin(), rotate_modes.end(), drive.driven_mode) == rotate_modes.end()) {
    throw ContractViolation("rotating_frame: driven mode " + std::to_string(drive.driven_mode) +
                            " is not in the rotated set");
  }
  for (std::size_t k : rotate_modes) {
    if (k >= dims.modes()) throw DimensionError("rotating_frame: rotated mode index out of range");
  }
  const std::vector<double> n_rot = dims.number_diagonal(rotate_modes);
  ComplexMatrix out = H;
  if (options.secular) {
    out = H.filtered([&](std::size_t i, std::size_t j) { return n_rot[i] == n_rot[j]; });
  }
  if (drive.omega_d != 0.0) {
    std::vector<double> shift(n_rot.size());
    std::transform(n_rot.begin(), n_rot.end(), shift.begin(), [&](double n) { return -drive.omega_d * n; });
    out = out + ComplexMatrix::diagonal(shift);
  }
  if (drive.amplitude != 0.0) {
    const ComplexMatrix a = embed(destroy(dims[drive.driven_mode]), drive.driven_mode, dims);
    out = out + Complex(0.0, -drive.amplitude) * (a - a.adjoint());
  }
  return out;
}

/// A Hamiltonian together with its bath description and probe geometry.
struct SystemModel {
  ComplexMatrix H;
  HilbertDims dims{2};
  std::vector<ModeSpec> modes;
  std::vector<std::size_t> rotate_modes;
  std::size_t driven_mode = 0;

  const ModeSpec& driven() const { return modes.at(driven_mode); }
};

/// Transmon probed; both transmon and mechanics rotate with the drive.
inline SystemModel make_model(const TwoBodySystem& s) {
  s.transmon.validate("transmon");
  s.mechanics.validate("mechanics");
  return {build_two_body_hamiltonian(s), s.dims(), {s.transmon, s.mechanics}, {0, 1}, 0};
}

/// HF mode probed; only the HF mode rotates.
inline SystemModel make_model(const ThreeBodyParams& p) {
  p.hf.validate("hf");
  p.lf.validate("lf");
  p.mech.validate("mech");
  p.check_crosskerr_consistency();
  return {build_three_body_hamiltonian(p), p.dims(), {p.hf, p.lf, p.mech}, {0}, 0};
}

/// Eigenvalues of a Hermitian matrix, ascending, shifted so the ground state sits at 0.
inline std::vector<double> ground_referenced_spectrum(const ComplexMatrix& H) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(H.to_dense(), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = eig.eigenvalues();
  std::vector<double> out(static_cast<std::size_t>(ev.size()));
  for (Eigen::Index i = 0; i < ev.size(); ++i) out[static_cast<std::size_t>(i)] = ev(i) - ev(0);
  return out;
}

}  // namespace pnr
