#pragma once

// Run configuration: INI text in, validated RunConfig out, and back.
// The schema is documented in docs/config.md.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/algorithm/string/trim.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "pnr/analysis.hpp"
#include "pnr/electromech.hpp"
#include "pnr/errors.hpp"
#include "pnr/model.hpp"

namespace pnr {

enum class Command { equiv, couple, analyze, qtable, spectrum };
enum class UnitSystem { SI, normalized };
enum class SystemKind { none, two_body, three_body };
enum class OutputFormat { csv, report };

inline const char* to_string(Command c) {
  switch (c) {
    case Command::equiv: return "equiv";
    case Command::couple: return "couple";
    case Command::analyze: return "analyze";
    case Command::qtable: return "qtable";
    case Command::spectrum: return "spectrum";
  }
  return "";
}

inline std::optional<Command> parse_command(std::string_view s) {
  for (Command c : {Command::equiv, Command::couple, Command::analyze, Command::qtable, Command::spectrum}) {
    if (s == to_string(c)) return c;
  }
  return std::nullopt;
}

inline const char* to_string(UnitSystem u) { return u == UnitSystem::SI ? "SI" : "normalized"; }
inline const char* to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "report"; }

struct SweepConfig {
  std::optional<double> start;
  std::optional<double> stop;
  std::size_t points = 401;
  unsigned threads = 0;

  bool explicit_grid() const { return start.has_value(); }
  bool operator==(const SweepConfig&) const = default;
};

struct AnalysisConfig {
  std::optional<double> omega_t_prime;  // rad/s
  std::optional<double> gamma_t;        // rad/s
  std::optional<double> chi_target;     // rad/s (E/hbar)
  double margin = 10.0;                 // chi target = margin x gamma_t when not given
  double max_S = 1.0;
  std::optional<double> omega_m0;
  std::optional<double> C_J;
  std::optional<double> C_d;
  std::optional<double> n_th;

  bool operator==(const AnalysisConfig&) const = default;
};

struct QtableConfig {
  double temperature = 0.02;
  double softening = 0.9;
  double margin = 10.0;
  std::vector<MembraneSpec> membranes;

  bool operator==(const QtableConfig&) const = default;
};

struct RunConfig {
  std::optional<Command> command;
  UnitSystem units = UnitSystem::normalized;

  SystemKind kind = SystemKind::none;
  /// two_body: {transmon, mech}; three_body: {hf, lf, mech}. The transmon omega is the
  /// g-e transition frequency; the bare omega_t' = omega + A is derived from it.
  std::vector<ModeSpec> modes;
  double g = 0.0;
  double chi_LH = 0.0;

  std::size_t driven_mode = 0;
  std::optional<double> drive_amplitude;
  bool secular = true;
  SweepConfig sweep;

  std::optional<MechanicalSpec> mechanics;
  std::optional<double> V0;
  std::optional<double> softening;  // bias chosen to soften by this ratio when V0 is absent
  std::optional<double> C_J;
  std::optional<double> L_J;
  std::optional<double> circuit_omega_t_prime;  // alternative to L_J
  double temperature = 0.02;
  std::optional<double> gamma_t;  // transmon loss for couple diagnostics

  AnalysisConfig analysis;
  QtableConfig qtable;

  std::optional<std::string> output_path;
  std::optional<OutputFormat> output_format;

  bool operator==(const RunConfig&) const = default;

  double drive_amplitude_or_default() const {
    return drive_amplitude ? *drive_amplitude : 1e-3 * modes.at(driven_mode).gamma;
  }
};

namespace detail {

inline const std::vector<std::string>& two_body_mode_names() {
  static const std::vector<std::string> n{"transmon", "mech"};
  return n;
}
inline const std::vector<std::string>& three_body_mode_names() {
  static const std::vector<std::string> n{"hf", "lf", "mech"};
  return n;
}

using Section = std::map<std::string, std::string>;

class SectionReader {
 public:
  SectionReader(std::string name, Section values) : name_(std::move(name)), values_(std::move(values)) {}

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string field(const std::string& key) const { return name_ + "." + key; }

  std::optional<std::string> text(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    used_.insert(key);
    return it->second;
  }

  std::optional<double> number(const std::string& key) {
    auto t = text(key);
    if (!t) return std::nullopt;
    return parse_number(field(key), *t);
  }

  double number_or(const std::string& key, double fallback) { return number(key).value_or(fallback); }

  double required(const std::string& key) {
    auto v = number(key);
    if (!v) throw ConfigError(field(key), "required value missing");
    return *v;
  }

  std::optional<std::size_t> count(const std::string& key) {
    auto v = number(key);
    if (!v) return std::nullopt;
    if (*v < 0 || std::floor(*v) != *v) throw ConfigError(field(key), "expected a non-negative integer");
    return static_cast<std::size_t>(*v);
  }

  std::optional<bool> flag(const std::string& key) {
    auto t = text(key);
    if (!t) return std::nullopt;
    if (*t == "true" || *t == "1" || *t == "yes") return true;
    if (*t == "false" || *t == "0" || *t == "no") return false;
    throw ConfigError(field(key), "expected true or false, got '" + *t + "'");
  }

  /// Every key must have been consumed.
  void finish() const {
    for (const auto& [k, v] : values_) {
      if (!used_.count(k)) throw ConfigError(field(k), "unknown key");
    }
  }

  /// Numbers are plain decimals, optionally prefixed by "2pi*" for Hz-to-rad/s input.
  static double parse_number(const std::string& field, std::string s) {
    double factor = 1.0;
    for (const char* prefix : {"2pi*", "2*pi*"}) {
      const std::string p(prefix);
      if (s.rfind(p, 0) == 0) {
        factor = 2.0 * constants::pi;
        s = s.substr(p.size());
        break;
      }
    }
    double v = 0.0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || s.empty()) {
      throw ConfigError(field, "cannot parse '" + s + "' as a number");
    }
    if (!std::isfinite(v)) throw ConfigError(field, "value must be finite");
    return factor * v;
  }

 private:
  std::string name_;
  Section values_;
  std::set<std::string> used_;
};

inline std::map<std::string, Section> read_sections(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("", "malformed configuration (line " + std::to_string(e.line()) + "): " + e.message());
  }
  std::map<std::string, Section> out;
  for (const auto& [name, sec] : tree) {
    if (sec.empty() && !sec.data().empty()) throw ConfigError(name, "key outside any section");
    Section s;
    for (const auto& [key, val] : sec) s.emplace(key, val.data());
    out.emplace(name, std::move(s));
  }
  // ptree drops sections without keys; they still have to be checked by name.
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    const auto open = line.find_first_not_of(" \t");
    const auto close = line.find_last_not_of(" \t\r");
    if (open == std::string::npos || line[open] != '[' || line[close] != ']') continue;
    std::string name = line.substr(open + 1, close - open - 1);
    boost::algorithm::trim(name);
    out.try_emplace(name);
  }
  return out;
}

inline ModeSpec read_mode(SectionReader& r, const std::string& name, bool anharmonic) {
  ModeSpec m;
  m.omega = r.required(name + ".omega");
  m.anharmonicity = anharmonic ? r.number_or(name + ".A", 0.0) : 0.0;
  m.gamma = r.number_or(name + ".gamma", 0.0);
  m.n_th = r.number_or(name + ".n_th", 0.0);
  const auto N = r.count(name + ".N");
  if (!N) throw ConfigError(r.field(name + ".N"), "required value missing");
  m.N = *N;
  if (!anharmonic && r.has(name + ".A")) throw ConfigError(r.field(name + ".A"), "mechanical mode is harmonic");
  if (m.gamma < 0.0) throw ConfigError(r.field(name + ".gamma"), "must be >= 0");
  if (m.n_th < 0.0) throw ConfigError(r.field(name + ".n_th"), "must be >= 0");
  if (m.N < 2) throw ConfigError(r.field(name + ".N"), "truncation must be >= 2");
  return m;
}

inline void require_si(const RunConfig& c, const std::string& section) {
  if (c.units != UnitSystem::SI) {
    throw ConfigError(section, "section uses SI quantities but units.system = normalized");
  }
}

}  // namespace detail

/// Parses INI text into a validated RunConfig.
inline RunConfig parse_config(const std::string& text) {
  using detail::SectionReader;
  auto sections = detail::read_sections(text);
  RunConfig c;
  std::set<std::string> known;
  auto section = [&](const std::string& name) {
    known.insert(name);
    auto it = sections.find(name);
    return SectionReader(name, it == sections.end() ? detail::Section{} : it->second);
  };
  auto present = [&](const std::string& name) { return sections.count(name) != 0; };

  {
    auto r = section("run");
    if (auto t = r.text("command")) {
      c.command = parse_command(*t);
      if (!c.command) throw ConfigError(r.field("command"), "unknown command '" + *t + "'");
    }
    r.finish();
  }
  {
    auto r = section("units");
    const auto sys = r.text("system");
    if (!sys) {
      if (present("modes") || present("mechanics") || present("analysis") || present("qtable")) {
        throw ConfigError("units.system", "required: SI or normalized");
      }
    } else if (*sys == "SI") {
      c.units = UnitSystem::SI;
    } else if (*sys == "normalized") {
      c.units = UnitSystem::normalized;
    } else {
      throw ConfigError(r.field("system"), "expected SI or normalized, got '" + *sys + "'");
    }
    r.finish();
  }
  if (present("modes")) {
    auto r = section("modes");
    const auto kind = r.text("kind");
    if (!kind) throw ConfigError(r.field("kind"), "required: two_body or three_body");
    if (*kind == "two_body") {
      c.kind = SystemKind::two_body;
      c.modes = {detail::read_mode(r, "transmon", true), detail::read_mode(r, "mech", false)};
    } else if (*kind == "three_body") {
      c.kind = SystemKind::three_body;
      c.modes = {detail::read_mode(r, "hf", true), detail::read_mode(r, "lf", true),
                 detail::read_mode(r, "mech", false)};
    } else {
      throw ConfigError(r.field("kind"), "expected two_body or three_body, got '" + *kind + "'");
    }
    r.finish();
  }
  if (present("couplings")) {
    auto r = section("couplings");
    if (c.kind == SystemKind::none) throw ConfigError("couplings", "requires a [modes] section");
    c.g = r.number_or("g", 0.0);
    if (c.g < 0.0) throw ConfigError(r.field("g"), "must be >= 0");
    if (c.kind == SystemKind::three_body) {
      c.chi_LH = r.number_or("chi_LH", 0.0);
    } else if (r.has("chi_LH")) {
      throw ConfigError(r.field("chi_LH"), "only meaningful for three_body systems");
    }
    r.finish();
  }
  if (present("drive")) {
    auto r = section("drive");
    if (c.kind == SystemKind::none) throw ConfigError("drive", "requires a [modes] section");
    if (auto m = r.text("mode")) {
      const auto& names =
          c.kind == SystemKind::two_body ? detail::two_body_mode_names() : detail::three_body_mode_names();
      auto it = std::find(names.begin(), names.end(), *m);
      if (it == names.end()) throw ConfigError(r.field("mode"), "unknown mode '" + *m + "'");
      c.driven_mode = static_cast<std::size_t>(it - names.begin());
    }
    c.drive_amplitude = r.number("amplitude");
    if (c.drive_amplitude && *c.drive_amplitude < 0.0) throw ConfigError(r.field("amplitude"), "must be >= 0");
    if (auto s = r.flag("secular")) c.secular = *s;
    r.finish();
  }
  if (present("sweep")) {
    auto r = section("sweep");
    c.sweep.start = r.number("start");
    c.sweep.stop = r.number("stop");
    if (c.sweep.start.has_value() != c.sweep.stop.has_value()) {
      throw ConfigError(r.field(c.sweep.start ? "stop" : "start"), "start and stop must be given together");
    }
    if (c.sweep.start && !(*c.sweep.stop > *c.sweep.start)) throw ConfigError(r.field("stop"), "must exceed start");
    if (auto p = r.count("points")) c.sweep.points = *p;
    if (c.sweep.points < 2) throw ConfigError(r.field("points"), "need at least 2 points");
    if (auto t = r.count("threads")) c.sweep.threads = static_cast<unsigned>(*t);
    r.finish();
  }
  if (present("mechanics")) {
    detail::require_si(c, "mechanics");
    auto r = section("mechanics");
    MechanicalSpec m;
    m.mass = r.required("mass");
    if (r.has("spring_constant") && r.has("omega")) {
      throw ConfigError(r.field("omega"), "give either spring_constant or omega, not both");
    }
    if (auto w = r.number("omega")) {
      m.spring_constant = m.mass * *w * *w;
    } else {
      m.spring_constant = r.required("spring_constant");
    }
    const int shapes = r.has("plate_area") + r.has("plate_side") + r.has("plate_diameter");
    if (shapes != 1) throw ConfigError(r.field("plate_area"), "give exactly one of plate_area, plate_side, plate_diameter");
    if (auto a = r.number("plate_area")) m.plate_area = *a;
    if (auto s = r.number("plate_side")) m.plate_area = *s * *s;
    if (auto d = r.number("plate_diameter")) m.plate_area = constants::pi * *d * *d / 4.0;
    m.gap = r.required("gap");
    try {
      m.validate();
    } catch (const DomainError& e) {
      throw ConfigError("mechanics", e.what());
    }
    c.mechanics = m;
    r.finish();
  }
  if (present("bias")) {
    detail::require_si(c, "bias");
    auto r = section("bias");
    c.V0 = r.number("V0");
    c.softening = r.number("softening");
    if (c.V0 && c.softening) throw ConfigError(r.field("softening"), "give either V0 or softening, not both");
    if (c.softening && !(*c.softening > 0.0 && *c.softening <= 1.0)) {
      throw ConfigError(r.field("softening"), "must be in (0, 1]");
    }
    r.finish();
  }
  if (present("circuit")) {
    detail::require_si(c, "circuit");
    auto r = section("circuit");
    c.C_J = r.number("C_J");
    c.L_J = r.number("L_J");
    c.circuit_omega_t_prime = r.number("omega_t_prime");
    if (c.L_J && c.circuit_omega_t_prime) throw ConfigError(r.field("L_J"), "give either L_J or omega_t_prime");
    c.temperature = r.number_or("temperature", c.temperature);
    c.gamma_t = r.number("gamma_t");
    if (c.C_J && !(*c.C_J > 0.0)) throw ConfigError(r.field("C_J"), "must be > 0");
    if (c.L_J && !(*c.L_J > 0.0)) throw ConfigError(r.field("L_J"), "must be > 0");
    r.finish();
  }
  if (present("analysis")) {
    auto r = section("analysis");
    auto& a = c.analysis;
    a.omega_t_prime = r.number("omega_t_prime");
    a.gamma_t = r.number("gamma_t");
    a.chi_target = r.number("chi_target");
    if (auto hz = r.number("chi_target_hz")) {
      if (a.chi_target) throw ConfigError(r.field("chi_target_hz"), "give either chi_target or chi_target_hz");
      a.chi_target = Energy::from_hertz(*hz).angular();
    }
    a.margin = r.number_or("margin", a.margin);
    a.max_S = r.number_or("max_S", a.max_S);
    a.omega_m0 = r.number("omega_m0");
    a.C_J = r.number("C_J");
    a.C_d = r.number("C_d");
    a.n_th = r.number("n_th");
    if (!(a.max_S > 0.0 && a.max_S <= 1.0)) throw ConfigError(r.field("max_S"), "must be in (0, 1]");
    r.finish();
  }
  if (present("qtable")) {
    detail::require_si(c, "qtable");
    auto r = section("qtable");
    c.qtable.temperature = r.number_or("temperature", c.qtable.temperature);
    c.qtable.softening = r.number_or("softening", c.qtable.softening);
    c.qtable.margin = r.number_or("margin", c.qtable.margin);
    if (c.qtable.temperature < 0.0) throw ConfigError(r.field("temperature"), "must be >= 0");
    if (!(c.qtable.softening > 0.0 && c.qtable.softening < 1.0)) {
      throw ConfigError(r.field("softening"), "must be in (0, 1)");
    }
    r.finish();
  }
  // Membranes keep their file order, which boost preserves.
  {
    boost::property_tree::ptree tree;
    std::istringstream in(text);
    boost::property_tree::ini_parser::read_ini(in, tree);
    for (const auto& [name, sec] : tree) {
      if (name.rfind("membrane:", 0) != 0) continue;
      detail::require_si(c, name);
      known.insert(name);
      detail::Section s;
      for (const auto& [key, val] : sec) s.emplace(key, val.data());
      SectionReader r(name, s);
      MembraneSpec m;
      m.label = name.substr(std::string("membrane:").size());
      if (m.label.empty()) throw ConfigError(name, "membrane label is empty");
      m.omega_m0 = r.required("omega");
      m.C_d = r.number("C_d");
      const int shapes = r.has("plate_area") + r.has("plate_side") + r.has("plate_diameter");
      if (m.C_d ? shapes != 0 : shapes != 1) {
        throw ConfigError(r.field("C_d"), "give C_d, or exactly one of plate_area, plate_side, plate_diameter with gap");
      }
      if (auto a = r.number("plate_area")) m.plate_area = *a;
      if (auto sd = r.number("plate_side")) m.plate_area = *sd * *sd;
      if (auto d = r.number("plate_diameter")) m.plate_area = constants::pi * *d * *d / 4.0;
      if (!m.C_d) m.gap = r.required("gap");
      r.finish();
      c.qtable.membranes.push_back(std::move(m));
    }
  }
  if (present("output")) {
    auto r = section("output");
    c.output_path = r.text("path");
    if (auto f = r.text("format")) {
      if (*f == "csv") {
        c.output_format = OutputFormat::csv;
      } else if (*f == "report") {
        c.output_format = OutputFormat::report;
      } else {
        throw ConfigError(r.field("format"), "expected csv or report");
      }
    }
    r.finish();
  }
  for (const auto& [name, s] : sections) {
    if (!known.count(name)) throw ConfigError(name, "unknown section");
  }

  if (c.kind != SystemKind::none) {
    if (c.driven_mode >= c.modes.size() || c.driven_mode == c.modes.size() - 1) {
      throw ConfigError("drive.mode", "the probe must drive an electrical mode");
    }
    if (c.kind == SystemKind::three_body && c.driven_mode != 0) {
      throw ConfigError("drive.mode", "three-body spectra probe the hf mode");
    }
    double max_omega = 0.0;
    bool reference = false;
    for (const auto& m : c.modes) {
      max_omega = std::max(max_omega, std::abs(m.omega));
      reference = reference || m.omega == 1.0;
    }
    if (c.units == UnitSystem::normalized && !reference) {
      throw ConfigError("units.system", "normalized systems need a reference mode with omega = 1");
    }
    if (c.units == UnitSystem::SI && max_omega < 1e3) {
      warn("units.system = SI but every mode frequency is below 1e3 rad/s; is this a normalized parameter set?");
    }
  }
  return c;
}

/// Rejects configurations that lack what `cmd` needs.
inline void validate_for(const RunConfig& c, Command cmd) {
  switch (cmd) {
    case Command::equiv:
    case Command::couple:
      if (c.units != UnitSystem::SI) throw ConfigError("units.system", std::string(to_string(cmd)) + " requires SI");
      if (!c.mechanics) throw ConfigError("mechanics", "section required");
      if (!c.V0 && !c.softening) throw ConfigError("bias", "V0 or softening required");
      if (cmd == Command::couple) {
        if (!c.C_J) throw ConfigError("circuit.C_J", "required");
        if (!c.L_J && !c.circuit_omega_t_prime) throw ConfigError("circuit.L_J", "L_J or omega_t_prime required");
      }
      break;
    case Command::qtable:
      if (c.units != UnitSystem::SI) throw ConfigError("units.system", "qtable requires SI");
      if (c.qtable.membranes.empty()) throw ConfigError("membrane", "at least one [membrane:<label>] section required");
      break;
    case Command::analyze: {
      const auto& a = c.analysis;
      const bool bound = a.omega_t_prime.has_value();
      if (bound && !a.chi_target && !a.gamma_t) {
        throw ConfigError("analysis.chi_target", "chi_target, chi_target_hz or gamma_t required");
      }
      if (!bound && c.kind == SystemKind::none) {
        throw ConfigError("analysis", "nothing to analyze: give [analysis] omega_t_prime or a [modes] system");
      }
      break;
    }
    case Command::spectrum:
      if (c.kind == SystemKind::none) throw ConfigError("modes", "section required");
      break;
  }
}

/// Table-convention system: transmon omega is the g-e transition, bare omega_t' = omega + A.
inline TwoBodySystem two_body_system(const RunConfig& c) {
  if (c.kind != SystemKind::two_body) throw ConfigError("modes.kind", "two_body system required");
  TwoBodySystem s{c.modes[0], c.modes[1], c.g};
  s.transmon.omega += s.transmon.anharmonicity;
  return s;
}

inline ThreeBodyParams three_body_params(const RunConfig& c) {
  if (c.kind != SystemKind::three_body) throw ConfigError("modes.kind", "three_body system required");
  return {c.modes[0], c.modes[1], c.modes[2], c.g, c.chi_LH};
}

inline SystemModel system_model(const RunConfig& c) {
  if (c.kind == SystemKind::two_body) return make_model(two_body_system(c));
  return make_model(three_body_params(c));
}

namespace detail {

inline std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Canonical INI text for `c`; parse_config(emit_config(c)) == c.
inline std::string emit_config(const RunConfig& c) {
  using detail::exact;
  std::ostringstream o;
  if (c.command) o << "[run]\ncommand = " << to_string(*c.command) << "\n\n";
  o << "[units]\nsystem = " << to_string(c.units) << "\n";
  if (c.kind != SystemKind::none) {
    const bool two = c.kind == SystemKind::two_body;
    const auto& names = two ? detail::two_body_mode_names() : detail::three_body_mode_names();
    o << "\n[modes]\nkind = " << (two ? "two_body" : "three_body") << "\n";
    for (std::size_t k = 0; k < c.modes.size(); ++k) {
      const auto& m = c.modes[k];
      const std::string& n = names[k];
      o << n << ".omega = " << exact(m.omega) << "\n";
      if (n != "mech") o << n << ".A = " << exact(m.anharmonicity) << "\n";
      o << n << ".gamma = " << exact(m.gamma) << "\n" << n << ".n_th = " << exact(m.n_th) << "\n"
        << n << ".N = " << m.N << "\n";
    }
    o << "\n[couplings]\ng = " << exact(c.g) << "\n";
    if (!two) o << "chi_LH = " << exact(c.chi_LH) << "\n";
    o << "\n[drive]\nmode = " << names[c.driven_mode] << "\nsecular = " << (c.secular ? "true" : "false") << "\n";
    if (c.drive_amplitude) o << "amplitude = " << exact(*c.drive_amplitude) << "\n";
  }
  o << "\n[sweep]\npoints = " << c.sweep.points << "\nthreads = " << c.sweep.threads << "\n";
  if (c.sweep.start) o << "start = " << exact(*c.sweep.start) << "\nstop = " << exact(*c.sweep.stop) << "\n";
  if (c.mechanics) {
    o << "\n[mechanics]\nmass = " << exact(c.mechanics->mass) << "\nspring_constant = "
      << exact(c.mechanics->spring_constant) << "\nplate_area = " << exact(c.mechanics->plate_area)
      << "\ngap = " << exact(c.mechanics->gap) << "\n";
  }
  if (c.V0 || c.softening) {
    o << "\n[bias]\n";
    if (c.V0) o << "V0 = " << exact(*c.V0) << "\n";
    if (c.softening) o << "softening = " << exact(*c.softening) << "\n";
  }
  if (c.units == UnitSystem::SI) {
    o << "\n[circuit]\ntemperature = " << exact(c.temperature) << "\n";
    if (c.C_J) o << "C_J = " << exact(*c.C_J) << "\n";
    if (c.L_J) o << "L_J = " << exact(*c.L_J) << "\n";
    if (c.circuit_omega_t_prime) o << "omega_t_prime = " << exact(*c.circuit_omega_t_prime) << "\n";
    if (c.gamma_t) o << "gamma_t = " << exact(*c.gamma_t) << "\n";
  }
  {
    const auto& a = c.analysis;
    o << "\n[analysis]\nmargin = " << exact(a.margin) << "\nmax_S = " << exact(a.max_S) << "\n";
    auto opt = [&](const char* key, const std::optional<double>& v) {
      if (v) o << key << " = " << exact(*v) << "\n";
    };
    opt("omega_t_prime", a.omega_t_prime);
    opt("gamma_t", a.gamma_t);
    opt("chi_target", a.chi_target);
    opt("omega_m0", a.omega_m0);
    opt("C_J", a.C_J);
    opt("C_d", a.C_d);
    opt("n_th", a.n_th);
  }
  if (c.units == UnitSystem::SI) {
    o << "\n[qtable]\ntemperature = " << exact(c.qtable.temperature) << "\nsoftening = " << exact(c.qtable.softening)
      << "\nmargin = " << exact(c.qtable.margin) << "\n";
    for (const auto& m : c.qtable.membranes) {
      o << "\n[membrane:" << m.label << "]\nomega = " << exact(m.omega_m0) << "\n";
      if (m.C_d) o << "C_d = " << exact(*m.C_d) << "\n";
      if (m.plate_area) o << "plate_area = " << exact(*m.plate_area) << "\n";
      if (m.gap) o << "gap = " << exact(*m.gap) << "\n";
    }
  }
  if (c.output_path || c.output_format) {
    o << "\n[output]\n";
    if (c.output_path) o << "path = " << *c.output_path << "\n";
    if (c.output_format) o << "format = " << to_string(*c.output_format) << "\n";
  }
  return o.str();
}

}  // namespace pnr
