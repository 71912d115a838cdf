#pragma once

// Text output: key = value reports and CSV tables, 12 significant digits.

#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pnr/analysis.hpp"
#include "pnr/solver.hpp"

namespace pnr {

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// Ordered key/value record. Keys appear in insertion order.
class Report {
 public:
  Report& add(std::string key, double v) { return put(std::move(key), format_number(v)); }
  Report& add(std::string key, bool v) { return put(std::move(key), v ? "true" : "false"); }
  Report& add(std::string key, const char* v) { return put(std::move(key), v); }
  Report& add(std::string key, std::string v) { return put(std::move(key), std::move(v)); }
  Report& add(std::string key, std::size_t v) { return put(std::move(key), std::to_string(v)); }
  Report& add(std::string key, int v) { return put(std::move(key), std::to_string(v)); }

  /// Free-form notes, written as `note = ...` lines after the fields.
  Report& note(std::string text) {
    notes_.push_back(std::move(text));
    return *this;
  }

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  const std::vector<std::string>& notes() const { return notes_; }

  const std::string* find(std::string_view key) const {
    for (const auto& [k, v] : entries_) {
      if (k == key) return &v;
    }
    return nullptr;
  }

  void write(std::ostream& out) const {
    for (const auto& [k, v] : entries_) out << k << " = " << v << '\n';
    for (const auto& n : notes_) out << "note = " << n << '\n';
  }

  void write_csv(std::ostream& out) const {
    out << "key,value\n";
    for (const auto& [k, v] : entries_) out << k << ',' << v << '\n';
  }

 private:
  Report& put(std::string key, std::string value) {
    entries_.emplace_back(std::move(key), std::move(value));
    return *this;
  }

  std::vector<std::pair<std::string, std::string>> entries_;
  std::vector<std::string> notes_;
};

inline void write_spectrum_csv(std::ostream& out, const SpectrumResult& r) {
  out << "omega_d,quad_re,quad_im,converged\n";
  for (std::size_t i = 0; i < r.size(); ++i) {
    out << format_number(r.omega_d_grid[i]) << ',' << format_number(r.quadrature_re[i]) << ','
        << format_number(r.quadrature_im[i]) << ',' << (r.converged[i] ? 1 : 0) << '\n';
  }
}

inline void write_qtable_csv(std::ostream& out, std::span<const RequirementRow> rows) {
  out << "label,C_d,C_t,L_J,E_J,I_c,g_over_omega,n_th,Q\n";
  for (const auto& r : rows) {
    out << r.label << ',' << format_number(r.C_d) << ',' << format_number(r.C_t) << ',' << format_number(r.L_J)
        << ',' << format_number(r.E_J.joules()) << ',' << format_number(r.I_c) << ','
        << format_number(r.g_over_omega) << ',' << format_number(r.n_th) << ',' << format_number(r.Q_required)
        << '\n';
  }
}

inline Report qtable_row_report(const RequirementRow& r) {
  Report rep;
  rep.add("label", r.label)
      .add("C_d", r.C_d)
      .add("C_t", r.C_t)
      .add("L_J", r.L_J)
      .add("E_J", r.E_J.joules())
      .add("E_J_over_h", r.E_J.hertz())
      .add("I_c", r.I_c)
      .add("g_over_omega", r.g_over_omega)
      .add("n_th", r.n_th)
      .add("Q", r.Q_required)
      .add("A_over_h", r.A.hertz())
      .add("geometry_dominates", r.geometry_dominates);
  return rep;
}

inline void write_qtable_report(std::ostream& out, std::span<const RequirementRow> rows) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i) out << '\n';
    out << "[" << rows[i].label << "]\n";
    qtable_row_report(rows[i]).write(out);
  }
}

}  // namespace pnr
