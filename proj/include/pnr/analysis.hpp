#pragma once

// Closed-form regime results: dispersive cross-Kerr rates and their bounds,
// resonant ladders, LF-mechanics hybridization, linewidths and the device
// requirements table.

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pnr/constants.hpp"
#include "pnr/electromech.hpp"
#include "pnr/errors.hpp"
#include "pnr/model.hpp"
#include "pnr/units.hpp"

namespace pnr {

enum class Regime { nonRWA, RWA, resonant, invalid };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::nonRWA: return "nonRWA";
    case Regime::RWA: return "RWA";
    case Regime::resonant: return "resonant";
    case Regime::invalid: return "invalid";
  }
  return "invalid";
}

/// "x >> y" means a factor of at least kStrongRatio; factors in [kWeakRatio, kStrongRatio)
/// are accepted with a note.
inline constexpr double kStrongRatio = 10.0;
inline constexpr double kWeakRatio = 3.0;

struct DispersiveReport {
  Energy chi_m;
  Energy A_m_tilde;
  double gamma_m_eff = 0.0;  // rad/s
  double gamma_t_eff = 0.0;  // rad/s
  Regime regime = Regime::invalid;
  double sigma = 0.0;
  double delta = 0.0;
  double g_over_delta = 0.0;
  double g_over_sigma = 0.0;
  std::vector<std::string> notes;
};

/// Dispersive coupling keeping counter-rotating terms (Sigma comparable to Delta):
/// chi_m = 8 A g^2 w_m'^2 / w_t'^4.
inline DispersiveReport dispersive_nonrwa(const TwoBodyParams& p, double gamma_t, double n_th) {
  DispersiveReport r;
  r.sigma = p.sigma();
  r.delta = p.delta();
  r.g_over_delta = r.delta != 0.0 ? p.g / std::abs(r.delta) : std::numeric_limits<double>::infinity();
  r.g_over_sigma = p.g / r.sigma;
  r.gamma_t_eff = (1.0 + 4.0 * n_th) * gamma_t;
  if (r.g_over_delta * kWeakRatio > 1.0) {
    r.regime = Regime::invalid;
    r.notes.push_back("g/|Delta| = " + std::to_string(r.g_over_delta) + ": not dispersive");
    return r;
  }
  r.regime = Regime::nonRWA;
  if (r.g_over_delta * kStrongRatio > 1.0) {
    r.notes.push_back("g/|Delta| = " + std::to_string(r.g_over_delta) + " exceeds 0.1");
  }
  const double x = p.omega_m_prime / p.omega_t_prime;
  const double gt = p.g / p.omega_t_prime;
  r.chi_m = 8.0 * p.A * gt * gt * x * x;
  r.A_m_tilde = p.A.angular() > 0.0 ? Energy::angular(std::pow(r.chi_m.angular(), 2) / (4.0 * p.A.angular()))
                                    : Energy::angular(0.0);
  r.gamma_m_eff = 4.0 * gamma_t * gt * gt;
  return r;
}

/// Normalized dispersive transduction S(k_eff) of a biased plate, with k_eff = u k, u in [0, 1].
inline double transduction_factor(double u, double C_J, double C_d) {
  const double c = C_J / C_d;
  const double s2 = (1.0 - u) * (1.0 - u) * (1.0 + c * u) / std::pow(1.0 + c, 3);
  return std::sqrt(std::max(s2, 0.0));
}

struct MaxChiResult {
  Energy bound;              // (hbar w_t'/10)(w_m0/w_t')^3 max_S
  Energy unit_bound;         // same with max_S = 1
  double max_S = 0.0;        // numerical maximum of S over k_eff in [0, k]
  double k_eff_over_k = 0.0; // optimizing k_eff / k
  bool interior = false;     // analytic branch: C_J > 2 C_d puts the optimum inside (0, k)
  double analytic_k_eff_over_k = 0.0;
  double analytic_max_S = 0.0;
  /// The literature interior coefficient C_d / (15 sqrt3 C_J); reproduced only if it agrees
  /// with the numerical maximum.
  double printed_interior_S = 0.0;
  bool printed_interior_reproduced = false;
};

/// Golden-section search of the unimodal S(u) on [0, 1].
inline MaxChiResult max_chi(double omega_m0, double omega_t_prime, double C_J, double C_d) {
  if (!(omega_m0 > 0.0) || !(omega_t_prime > 0.0) || !(C_J >= 0.0) || !(C_d > 0.0)) {
    throw DomainError("max_chi: frequencies and C_d must be > 0, C_J >= 0");
  }
  auto S = [&](double u) { return transduction_factor(u, C_J, C_d); };
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = 1.0;
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = S(x1), f2 = S(x2);
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = S(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = S(x1);
    }
  }
  MaxChiResult r;
  const double u_star = 0.5 * (lo + hi);
  r.k_eff_over_k = u_star;
  r.max_S = S(u_star);
  if (S(0.0) >= r.max_S) {
    r.k_eff_over_k = 0.0;
    r.max_S = S(0.0);
  }
  const double c = C_J / C_d;
  r.interior = c > 2.0;
  r.analytic_k_eff_over_k = r.interior ? (c - 2.0) / (3.0 * c) : 0.0;
  r.analytic_max_S = S(r.analytic_k_eff_over_k);
  r.printed_interior_S = c > 0.0 ? 1.0 / (15.0 * std::sqrt(3.0) * c) : 0.0;
  r.printed_interior_reproduced = r.interior && std::abs(r.printed_interior_S - r.max_S) <= 1e-6 * r.max_S;
  const double scale = std::pow(omega_m0 / omega_t_prime, 3);
  r.unit_bound = Energy::angular(omega_t_prime / 10.0 * scale);
  r.bound = r.unit_bound * r.max_S;
  return r;
}

/// Smallest bare mechanical frequency for which the dispersive bound can reach `chi_target`.
inline double min_mechanical_frequency(double omega_t_prime, Energy chi_target, double max_S = 1.0) {
  if (!(omega_t_prime > 0.0) || !(chi_target.angular() > 0.0) || !(max_S > 0.0)) {
    throw DomainError("min_mechanical_frequency: inputs must be > 0");
  }
  return omega_t_prime * std::cbrt(10.0 * chi_target.angular() / (omega_t_prime * max_S));
}

/// Largest transmon loss 1/Q_t compatible with resolving the mechanical spectrum: the
/// condition is Q_t^-1 << (1/20)(w_m'/w_t')^5.
inline double mechanical_resolution_bound(double omega_m_prime, double omega_t_prime) {
  return std::pow(omega_m_prime / omega_t_prime, 5) / 20.0;
}

struct RwaDispersive {
  Energy chi_m;  // signed
  Energy A_m;
  double gamma_m_eff = 0.0;
  double gamma_t_eff = 0.0;
  Regime regime = Regime::RWA;
  std::vector<std::string> notes;
};

struct RwaContext {
  std::optional<double> sigma;  // rad/s, for the Sigma >> |Delta| check
  double gamma_t = 0.0;
  double gamma_m = 0.0;
  double n_th = 0.0;
};

/// chi_m = 2 A g^2 / (Delta (Delta - A)), A_m = chi_m^2 / 4A; all in rad/s.
inline RwaDispersive dispersive_rwa(double Delta, Energy A, double g, const RwaContext& ctx = {}) {
  const double a = A.angular();
  const double d2 = Delta - a;
  if (Delta == 0.0 || d2 == 0.0) {
    throw DomainError("dispersive_rwa: Delta = 0 or Delta = A/hbar sits on a pole of chi_m");
  }
  RwaDispersive r;
  const double chi = 2.0 * a * g * g / (Delta * d2);
  r.chi_m = Energy::angular(chi);
  r.A_m = Energy::angular(a != 0.0 ? chi * chi / (4.0 * a) : 0.0);
  r.gamma_m_eff = ctx.gamma_m + ctx.gamma_t * g * g / (Delta * d2);
  r.gamma_t_eff = (1.0 + 4.0 * ctx.n_th) * ctx.gamma_t;
  const double worst = g / std::min(std::abs(Delta), std::abs(d2));
  if (worst * kWeakRatio > 1.0) {
    r.regime = Regime::invalid;
    r.notes.push_back("g is not small against |Delta| and |Delta - A|");
  } else if (worst * kStrongRatio > 1.0) {
    r.notes.push_back("g within a factor 10 of |Delta| or |Delta - A|");
  }
  if (ctx.sigma && *ctx.sigma < kStrongRatio * std::abs(Delta)) {
    r.notes.push_back("Sigma is not >> |Delta|; counter-rotating terms matter");
    if (*ctx.sigma < kWeakRatio * std::abs(Delta)) r.regime = Regime::invalid;
  }
  return r;
}

struct JcLadder {
  double omega = 0.0;
  double g = 0.0;
  std::vector<double> plus;   // plus[n-1] = n w + sqrt(n) g
  std::vector<double> minus;  // minus[n-1] = n w - sqrt(n) g

  double energy(std::size_t n, int sign) const {
    if (n == 0) return 0.0;
    return (sign >= 0 ? plus : minus).at(n - 1);
  }
  /// Frequency of |n-1, s> -> |n, s>.
  double transition(std::size_t n, int sign) const { return energy(n, sign) - energy(n - 1, sign); }
  /// Separation of the |0,g> <-> |1,+-> and |1,+-> <-> |2,+-> lines, g (2 - sqrt2).
  double resolution_gap() const { return g * (2.0 - std::sqrt(2.0)); }
};

inline JcLadder jc_levels(double omega, double g, std::size_t n_max) {
  if (n_max < 1) throw DomainError("jc_levels: n_max must be >= 1");
  JcLadder l{omega, g, {}, {}};
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double dn = static_cast<double>(n);
    l.plus.push_back(dn * omega + std::sqrt(dn) * g);
    l.minus.push_back(dn * omega - std::sqrt(dn) * g);
  }
  return l;
}

struct ResonantModes {
  double omega_plus = 0.0;
  double omega_minus = 0.0;
  Energy A_plus;
  Energy A_minus;
  Energy chi;
  double gamma = 0.0;  // each normal mode, (gamma_t + gamma_m)/2
  std::vector<std::string> notes;
};

/// Normal modes of a resonant transmon-mechanics pair with g >> A.
inline ResonantModes resonant_normal_modes(double omega, double g, Energy E_C, double gamma_t = 0.0,
                                           double gamma_m = 0.0) {
  if (!(omega > 0.0) || !(g >= 0.0)) throw DomainError("resonant_normal_modes: omega > 0 and g >= 0 required");
  ResonantModes m;
  const double shift = g * g / (2.0 * omega);
  m.omega_plus = omega + g - shift;
  m.omega_minus = omega - g - shift;
  m.A_plus = E_C / 4.0;
  m.A_minus = E_C / 4.0;
  m.chi = E_C / 2.0;
  m.gamma = 0.5 * (gamma_t + gamma_m);
  if (g / omega > 0.2) m.notes.push_back("g/omega = " + std::to_string(g / omega) + " exceeds 0.2");
  return m;
}

struct CrossKerrLadder {
  std::vector<Energy> plus;   // chi_{n,+} = chi_LH cos^2 theta_n
  std::vector<Energy> minus;  // chi_{n,-} = chi_LH sin^2 theta_n
  /// |chi_{1,+} - chi_{2,+}| (equal to the minus-branch difference).
  Energy discriminability;
};

/// tan 2 theta_n = -2 g sqrt(n) / Delta on the principal branch; Delta = 0 gives theta = pi/4.
inline CrossKerrLadder three_body_jc_crosskerr(double g, double Delta, Energy chi_LH, std::size_t n_max) {
  if (n_max < 1) throw DomainError("three_body_jc_crosskerr: n_max must be >= 1");
  CrossKerrLadder out;
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double coupling = 2.0 * g * std::sqrt(static_cast<double>(n));
    const double hyp = std::hypot(Delta, coupling);
    const double cos2t = hyp > 0.0 ? std::abs(Delta) / hyp : 1.0;
    out.plus.push_back(chi_LH * (0.5 * (1.0 + cos2t)));
    out.minus.push_back(chi_LH * (0.5 * (1.0 - cos2t)));
  }
  if (n_max >= 2) {
    out.discriminability = Energy::angular(std::abs(out.plus[0].angular() - out.plus[1].angular()));
  }
  return out;
}

struct NormalModeSplit {
  double f = 1.0;
  double h = 0.0;
  double omega_1 = 0.0;  // LF-like normal mode
  double Delta_1 = 0.0;  // (mechanics-like mode) - omega_1
  Energy chi_L;
  Energy chi_m;
};

/// LF mode hybridized with mechanics, Delta = w_tL' - w_m. The LF-like mode sits at
/// w_tL' - (Delta/2)(1 - sqrt(1 + 4 g^2/Delta^2)).
inline NormalModeSplit hybridize(double g, double Delta, double omega_tL, Energy chi_LH) {
  NormalModeSplit s;
  if (Delta == 0.0) {
    s.f = s.h = std::sqrt(0.5);
    s.omega_1 = omega_tL - g;
    s.Delta_1 = 2.0 * g;
  } else {
    const double x = g / Delta;
    const double root = std::sqrt(1.0 + 4.0 * x * x);
    const double norm = std::sqrt(8.0 * x * x + 2.0 * (1.0 + root));
    s.f = (1.0 + root) / norm;
    s.h = 2.0 * std::abs(x) / norm;
    s.omega_1 = omega_tL - 0.5 * Delta * (1.0 - root);
    s.Delta_1 = -Delta * root;
  }
  if (std::abs(s.f * s.f + s.h * s.h - 1.0) > 1e-12) throw std::logic_error("hybridize: f^2 + h^2 != 1");
  s.chi_L = chi_LH * (s.f * s.f);
  s.chi_m = chi_LH * (s.h * s.h);
  return s;
}

/// gamma_tH + 2 gamma_tL (<n_L> + (1 + 2 <n_L>) n_th)
inline double hf_effective_linewidth(double gamma_tH, double gamma_tL, double n_th, double n_L_avg = 0.5) {
  if (gamma_tH < 0.0 || gamma_tL < 0.0 || n_th < 0.0 || n_L_avg < 0.0) {
    throw DomainError("hf_effective_linewidth: inputs must be >= 0");
  }
  return gamma_tH + 2.0 * gamma_tL * (n_L_avg + (1.0 + 2.0 * n_L_avg) * n_th);
}

/// Large-n_th, half-hybridized form gamma_tH + 4 n_th gamma_tL.
inline double hf_effective_linewidth_approx(double gamma_tH, double gamma_tL, double n_th) {
  return gamma_tH + 4.0 * n_th * gamma_tL;
}

/// Predicted HF-probe line with its ladder labels.
struct PredictedLine {
  double omega = 0.0;
  int n_L = 0;
  int n_m = 0;
};

/// A_L, chi_LH >> g: lines at w_H' +- g sqrt(n) and w_H' - chi_LH +- g sqrt(n).
inline std::vector<PredictedLine> hf_lines_jc(double omega_H, double g, Energy chi_LH, int n_max) {
  std::vector<PredictedLine> out{{omega_H, 0, 0}, {omega_H - chi_LH.angular(), 1, 0}};
  for (int n = 1; n <= n_max; ++n) {
    const double s = g * std::sqrt(static_cast<double>(n));
    for (double base : {omega_H, omega_H - chi_LH.angular()}) {
      out.push_back({base + s, base == omega_H ? 0 : 1, n});
      out.push_back({base - s, base == omega_H ? 0 : 1, -n});
    }
  }
  return out;
}

/// g >> chi_LH >> A_L: w_H' - n_L chi_L - n_m chi_m over the hybridized modes.
inline std::vector<PredictedLine> hf_lines_hybridized(double omega_H, const NormalModeSplit& s, int n_max) {
  std::vector<PredictedLine> out;
  for (int nl = 0; nl <= n_max; ++nl) {
    for (int nm = 0; nm <= n_max; ++nm) {
      out.push_back({omega_H - nl * s.chi_L.angular() - nm * s.chi_m.angular(), nl, nm});
    }
  }
  return out;
}

/// chi_LH >> g >> A_L: w_H' - n_L (chi_LH - g) - n_m g and w_H' - n_L (chi_LH + g) + n_m g.
/// With n_L = 0 these are the mechanical sidebands w_H' -+ n g.
inline std::vector<PredictedLine> hf_lines_strong_crosskerr(double omega_H, double g, Energy chi_LH, int n_max) {
  const double chi = chi_LH.angular();
  std::vector<PredictedLine> out;
  for (int nl = 0; nl <= n_max; ++nl) {
    for (int nm = 0; nm <= n_max; ++nm) {
      out.push_back({omega_H - nl * (chi - g) - nm * g, nl, nm});
      if (nl != 0 || nm != 0) out.push_back({omega_H - nl * (chi + g) + nm * g, nl, -nm});
    }
  }
  return out;
}

struct RegimeReport {
  Regime regime = Regime::invalid;
  std::vector<std::string> notes;
};

/// Two-body regime from the ratios of g to Delta, Delta - A and Sigma.
inline RegimeReport classify_two_body(const TwoBodyParams& p) {
  RegimeReport r;
  const double g = p.g;
  const double dmin = std::min(std::abs(p.delta()), std::abs(p.delta() - p.A.angular()));
  if (g == 0.0) {
    r.regime = Regime::invalid;
    r.notes.push_back("g = 0: uncoupled");
    return r;
  }
  if (dmin >= kStrongRatio * g) {
    r.regime = p.sigma() >= kStrongRatio * std::abs(p.delta()) ? Regime::RWA : Regime::nonRWA;
  } else if (g >= kStrongRatio * std::abs(p.delta())) {
    r.regime = Regime::resonant;
  } else if (dmin >= kWeakRatio * g) {
    r.regime = p.sigma() >= kStrongRatio * std::abs(p.delta()) ? Regime::RWA : Regime::nonRWA;
    r.notes.push_back("dispersive only by a factor " + std::to_string(dmin / g));
  } else if (g >= kWeakRatio * std::abs(p.delta())) {
    r.regime = Regime::resonant;
    r.notes.push_back("resonant only by a factor " + std::to_string(g / std::abs(p.delta())));
  } else {
    r.regime = Regime::invalid;
    r.notes.push_back("g comparable to the detuning");
  }
  if (!p.within_transmon_limit()) r.notes.push_back("A/(hbar omega_t') above 1/20");
  return r;
}

/// Mechanical element for the requirements table. Provide either `C_d` directly or the
/// plate geometry (area and gap); the geometry gives C_d = eps0 area / gap.
struct MembraneSpec {
  std::string label;
  double omega_m0 = 0.0;  // rad/s
  std::optional<double> C_d;
  std::optional<double> plate_area;
  std::optional<double> gap;

  double capacitance() const {
    if (C_d) return *C_d;
    if (plate_area && gap) return constants::epsilon0 * *plate_area / *gap;
    throw DomainError("MembraneSpec '" + label + "': needs C_d or plate area and gap");
  }

  static MembraneSpec square(std::string label, double omega, double side, double gap) {
    return {std::move(label), omega, std::nullopt, side * side, gap};
  }
  static MembraneSpec circular(std::string label, double omega, double diameter, double gap) {
    return {std::move(label), omega, std::nullopt, constants::pi * diameter * diameter / 4.0, gap};
  }

  bool operator==(const MembraneSpec&) const = default;
};

struct RequirementRow {
  std::string label;
  double C_d = 0.0;
  double C_t = 0.0;
  double L_J = 0.0;
  Energy E_J;
  double I_c = 0.0;
  double g_over_omega = 0.0;
  double n_th = 0.0;
  double Q_required = 0.0;
  /// C_d alone exceeds the transmon-limit capacitance: no shunt, C_J = 0.
  bool geometry_dominates = false;
  Energy A;
};

/// Transmon resonant with each membrane at the transmon limit A = hbar w / 20, biased to
/// soften the mechanics by `r`; Q needed for g = margin x 4 gamma n_th.
inline std::vector<RequirementRow> requirements_table(std::span<const MembraneSpec> membranes, double T = 0.02,
                                                      double r = 0.9, double margin = 10.0) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("requirements_table: r must be in (0, 1)");
  if (!(margin > 0.0)) throw DomainError("requirements_table: margin must be > 0");
  using constants::e;
  using constants::hbar;
  std::vector<RequirementRow> rows;
  for (const auto& m : membranes) {
    const double w = m.omega_m0;
    if (!(w > 0.0)) throw DomainError("requirements_table: membrane '" + m.label + "' frequency must be > 0");
    RequirementRow row;
    row.label = m.label;
    row.C_d = m.capacitance();
    row.C_t = 10.0 * e * e / (hbar * w);
    double C_J = row.C_t - row.C_d;
    if (C_J < 0.0) {
      row.geometry_dominates = true;
      C_J = 0.0;
      row.C_t = row.C_d;
    }
    row.A = Energy::from_joules(e * e / (2.0 * row.C_t));
    row.L_J = 1.0 / (w * w * row.C_t);
    row.E_J = Energy::from_joules(std::pow(constants::reduced_flux_quantum, 2) / row.L_J);
    row.I_c = 2.0 * constants::pi * row.E_J.joules() / constants::flux_quantum;
    const double r2 = r * r;
    row.g_over_omega = 0.5 * std::sqrt((1.0 - r2) / (1.0 + (C_J / row.C_d) * r2));
    row.n_th = thermal_occupation(w, T);
    row.Q_required = margin * 4.0 * row.n_th / row.g_over_omega;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace pnr
