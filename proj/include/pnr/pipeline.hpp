#pragma once

// End-to-end commands over a RunConfig. Each returns its text output.

#include <sstream>
#include <string>

#include "pnr/analysis.hpp"
#include "pnr/config.hpp"
#include "pnr/electromech.hpp"
#include "pnr/model.hpp"
#include "pnr/report.hpp"
#include "pnr/solver.hpp"

namespace pnr {

inline double bias_voltage(const RunConfig& c) {
  if (c.V0) return *c.V0;
  return bias_for_softening(*c.mechanics, *c.softening);
}

inline Report equiv_report(const RunConfig& c) {
  validate_for(c, Command::equiv);
  const MechanicalSpec& m = *c.mechanics;
  const EquivalentCircuit e = equivalent_circuit(m, bias_voltage(c));
  Report r;
  r.add("V0", e.V0)
      .add("pull_in_voltage", pull_in_voltage(m))
      .add("x0", e.x0)
      .add("rest_gap", e.rest_gap)
      .add("C_d", e.C_d)
      .add("k_eff", e.k_eff)
      .add("softening_ratio", e.softening_ratio())
      .add("C_m", e.C_m)
      .add("L_m", e.L_m)
      .add("Z_m", e.Z_m)
      .add("omega_m_V0", e.omega_m_V0)
      .add("omega_m_0", e.omega_m_0)
      .add("decoupled", e.decoupled);
  return r;
}

inline TwoBodyParams couple_params(const RunConfig& c) {
  validate_for(c, Command::couple);
  const EquivalentCircuit e = equivalent_circuit(*c.mechanics, bias_voltage(c));
  double L_J = c.L_J.value_or(0.0);
  if (!c.L_J) L_J = 1.0 / (std::pow(*c.circuit_omega_t_prime, 2) * (*c.C_J + e.C_d));
  return quantize_two_body(e, *c.C_J, L_J);
}

inline Report couple_report(const RunConfig& c) {
  const TwoBodyParams p = couple_params(c);
  Report r;
  r.add("omega_t_prime", p.omega_t_prime)
      .add("omega_t", p.omega_t())
      .add("omega_m_prime", p.omega_m_prime)
      .add("g", p.g)
      .add("g_over_omega_t_prime", p.g / p.omega_t_prime)
      .add("A", p.A.joules())
      .add("A_over_h", p.A.hertz())
      .add("transmon_limit_ratio", p.transmon_limit_ratio())
      .add("within_transmon_limit", p.within_transmon_limit())
      .add("C_t", p.C_t)
      .add("C_J", p.C_J)
      .add("C_d", p.C_d)
      .add("L_J", p.L_J)
      .add("Sigma", p.sigma())
      .add("Delta", p.delta())
      .add("decoupled", p.decoupled);
  if (p.decoupled) return r;
  const RegimeReport regime = classify_two_body(p);
  r.add("regime", to_string(regime.regime));
  for (const auto& n : regime.notes) r.note(n);
  const double n_th_t = thermal_occupation(p.omega_t_prime, c.temperature);
  const double n_th_m = thermal_occupation(p.omega_m_prime, c.temperature);
  r.add("n_th_transmon", n_th_t).add("n_th_mech", n_th_m);
  const double gamma_t = c.gamma_t.value_or(0.0);
  const DispersiveReport d = dispersive_nonrwa(p, gamma_t, n_th_t);
  if (d.regime != Regime::invalid) {
    r.add("chi_m_nonRWA", d.chi_m.joules())
        .add("chi_m_nonRWA_over_h", d.chi_m.hertz())
        .add("A_m_tilde_over_h", d.A_m_tilde.hertz())
        .add("gamma_m_eff", d.gamma_m_eff)
        .add("gamma_t_eff", d.gamma_t_eff)
        .add("Qt_inverse_bound", mechanical_resolution_bound(p.omega_m_prime, p.omega_t_prime));
  }
  for (const auto& n : d.notes) r.note(n);
  return r;
}

inline Report analyze_report(const RunConfig& c) {
  validate_for(c, Command::analyze);
  const AnalysisConfig& a = c.analysis;
  Report r;
  if (a.omega_t_prime) {
    const double w = *a.omega_t_prime;
    const double chi = a.chi_target ? *a.chi_target : a.margin * *a.gamma_t;
    const Energy target = Energy::angular(chi);
    const double w_min = min_mechanical_frequency(w, target, a.max_S);
    r.add("omega_t_prime", w)
        .add("chi_target", target.joules())
        .add("chi_target_over_h", target.hertz())
        .add("max_S", a.max_S)
        .add("min_omega_m0", w_min)
        .add("min_f_m0", w_min / (2.0 * constants::pi));
    if (a.gamma_t) {
      r.add("gamma_t", *a.gamma_t);
      if (a.n_th) r.add("gamma_t_eff", (1.0 + 4.0 * *a.n_th) * *a.gamma_t);
    }
    if (a.omega_m0 && a.C_J && a.C_d) {
      const MaxChiResult m = max_chi(*a.omega_m0, w, *a.C_J, *a.C_d);
      r.add("max_chi", m.bound.joules())
          .add("max_chi_over_h", m.bound.hertz())
          .add("max_S_numeric", m.max_S)
          .add("k_eff_over_k_opt", m.k_eff_over_k)
          .add("interior_optimum", m.interior)
          .add("analytic_max_S", m.analytic_max_S)
          .add("printed_interior_S", m.printed_interior_S)
          .add("printed_interior_reproduced", m.printed_interior_reproduced)
          .add("Qt_inverse_bound", mechanical_resolution_bound(*a.omega_m0, w));
    }
  }
  if (c.kind == SystemKind::two_body) {
    const TwoBodySystem s = two_body_system(c);
    TwoBodyParams p;
    p.omega_t_prime = s.transmon.omega;
    p.omega_m_prime = s.mechanics.omega;
    p.g = s.g;
    p.A = Energy::angular(s.transmon.anharmonicity);
    const RegimeReport regime = classify_two_body(p);
    r.add("system", "two_body")
        .add("regime", to_string(regime.regime))
        .add("Sigma", p.sigma())
        .add("Delta", p.delta())
        .add("gamma_t_eff", (1.0 + 4.0 * s.transmon.n_th) * s.transmon.gamma);
    for (const auto& n : regime.notes) r.note(n);
    if (regime.regime == Regime::resonant) {
      const double omega = 0.5 * (p.omega_t() + p.omega_m_prime);
      const JcLadder l = jc_levels(omega, p.g, 2);
      r.add("jc_line_1_plus", l.transition(1, +1))
          .add("jc_line_1_minus", l.transition(1, -1))
          .add("jc_line_2_plus", l.transition(2, +1))
          .add("jc_line_2_minus", l.transition(2, -1))
          .add("jc_resolution_gap", l.resolution_gap());
      const ResonantModes nm = resonant_normal_modes(omega, p.g, p.A, s.transmon.gamma, s.mechanics.gamma);
      r.add("omega_plus", nm.omega_plus)
          .add("omega_minus", nm.omega_minus)
          .add("A_plus", nm.A_plus.angular())
          .add("A_minus", nm.A_minus.angular())
          .add("chi_normal_modes", nm.chi.angular())
          .add("gamma_normal_modes", nm.gamma);
      for (const auto& n : nm.notes) r.note(n);
    } else if (regime.regime == Regime::RWA) {
      const RwaDispersive d = dispersive_rwa(p.delta(), p.A, p.g,
                                             {p.sigma(), s.transmon.gamma, s.mechanics.gamma, s.transmon.n_th});
      r.add("chi_m", d.chi_m.angular())
          .add("A_m", d.A_m.angular())
          .add("gamma_m_eff", d.gamma_m_eff)
          .add("gamma_t_eff_rwa", d.gamma_t_eff);
      for (const auto& n : d.notes) r.note(n);
    } else if (regime.regime == Regime::nonRWA) {
      const DispersiveReport d = dispersive_nonrwa(p, s.transmon.gamma, s.transmon.n_th);
      r.add("chi_m", d.chi_m.angular()).add("A_m_tilde", d.A_m_tilde.angular()).add("gamma_m_eff", d.gamma_m_eff);
      for (const auto& n : d.notes) r.note(n);
    }
  } else if (c.kind == SystemKind::three_body) {
    const ThreeBodyParams p = three_body_params(c);
    const double Delta = p.lf.omega - p.mech.omega;
    const Energy chi = Energy::angular(p.chi_LH);
    r.add("system", "three_body").add("Delta_LF_mech", Delta).add("g_over_Delta", Delta != 0.0 ? p.g / Delta : 0.0);
    if (auto ratio = p.crosskerr_consistency()) {
      r.add("chi_LH_over_2sqrt_AH_AL", *ratio);
      if (std::abs(*ratio - 1.0) > 0.01) r.note("chi_LH differs from 2 sqrt(A_H A_L)");
    }
    const CrossKerrLadder ck = three_body_jc_crosskerr(p.g, Delta, chi, 2);
    r.add("chi_1_plus", ck.plus[0].angular())
        .add("chi_1_minus", ck.minus[0].angular())
        .add("chi_2_plus", ck.plus[1].angular())
        .add("chi_2_minus", ck.minus[1].angular())
        .add("chi_discriminability", ck.discriminability.angular());
    const NormalModeSplit h = hybridize(p.g, Delta, p.lf.omega, chi);
    r.add("hybrid_f", h.f)
        .add("hybrid_h", h.h)
        .add("omega_1", h.omega_1)
        .add("Delta_1", h.Delta_1)
        .add("chi_L", h.chi_L.angular())
        .add("chi_m", h.chi_m.angular());
    const double n_th = p.lf.n_th;
    r.add("gamma_H_eff", hf_effective_linewidth(p.hf.gamma, p.lf.gamma, n_th, 0.5))
        .add("gamma_H_eff_approx", hf_effective_linewidth_approx(p.hf.gamma, p.lf.gamma, n_th));
  }
  return r;
}

inline std::vector<RequirementRow> qtable_rows(const RunConfig& c) {
  validate_for(c, Command::qtable);
  return requirements_table(c.qtable.membranes, c.qtable.temperature, c.qtable.softening, c.qtable.margin);
}

struct SpectrumRun {
  SpectrumResult result;
  std::vector<Peak> peaks;
};

inline SpectrumRun spectrum_run(const RunConfig& c) {
  validate_for(c, Command::spectrum);
  const SystemModel model = system_model(c);
  SweepOptions opts;
  opts.threads = c.sweep.threads;
  opts.frame.secular = c.secular;
  const std::vector<double> grid = c.sweep.explicit_grid()
                                       ? linspace(*c.sweep.start, *c.sweep.stop, c.sweep.points)
                                       : auto_grid(model, c.sweep.points);
  const DriveSpec drive{c.driven_mode, 0.0, c.drive_amplitude_or_default()};
  SpectrumRun run{spectrum_sweep(model, drive, grid, opts), {}};
  run.peaks = detect_peaks(run.result, 1e-3);
  return run;
}

inline Report spectrum_report(const SpectrumRun& run) {
  const SpectrumResult& s = run.result;
  Report r;
  std::size_t ok = 0;
  for (bool b : s.converged) ok += b;
  r.add("points", s.size()).add("converged", ok).add("peaks", run.peaks.size());
  for (std::size_t i = 0; i < run.peaks.size(); ++i) {
    r.add("peak_" + std::to_string(i + 1) + "_omega", run.peaks[i].omega);
    r.add("peak_" + std::to_string(i + 1) + "_height", run.peaks[i].height);
  }
  for (const auto& [i, msg] : s.failures) r.note("point " + std::to_string(i) + ": " + msg);
  return r;
}

/// Runs `cmd` and returns its output text.
inline std::string run_command(const RunConfig& c, Command cmd, std::optional<OutputFormat> format = std::nullopt) {
  if (c.command && *c.command != cmd) {
    throw ConfigError("run.command", std::string("config is for '") + to_string(*c.command) + "', not '" +
                                         to_string(cmd) + "'");
  }
  const bool tabular = cmd == Command::qtable || cmd == Command::spectrum;
  const OutputFormat f = format.value_or(c.output_format.value_or(tabular ? OutputFormat::csv : OutputFormat::report));
  std::ostringstream out;
  auto emit = [&](const Report& r) {
    if (f == OutputFormat::csv) {
      r.write_csv(out);
    } else {
      r.write(out);
    }
  };
  switch (cmd) {
    case Command::equiv: emit(equiv_report(c)); break;
    case Command::couple: emit(couple_report(c)); break;
    case Command::analyze: emit(analyze_report(c)); break;
    case Command::qtable: {
      const auto rows = qtable_rows(c);
      if (f == OutputFormat::csv) {
        write_qtable_csv(out, rows);
      } else {
        write_qtable_report(out, rows);
      }
      break;
    }
    case Command::spectrum: {
      const SpectrumRun run = spectrum_run(c);
      std::size_t ok = 0;
      for (bool b : run.result.converged) ok += b;
      if (ok == 0) throw SolverError("spectrum: no grid point converged");
      if (f == OutputFormat::csv) {
        write_spectrum_csv(out, run.result);
      } else {
        spectrum_report(run).write(out);
      }
      break;
    }
  }
  return out.str();
}

}  // namespace pnr
