#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "pnr/pipeline.hpp"

using namespace pnr;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(PNR_CONFIG_DIR) + "/" + name);
  EXPECT_TRUE(in) << name;
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string field_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<no error>";
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

const char* kMinimal = R"([units]
system = normalized
[modes]
kind = two_body
transmon.omega = 1
transmon.A = 0.05
transmon.gamma = 1e-4
transmon.n_th = 0
transmon.N = 3
mech.omega = 0.8
mech.gamma = 1e-6
mech.n_th = 0
mech.N = 2
[couplings]
g = 0.001
)";

}  // namespace

TEST(ParseConfig, FigS2Transcription) {
  const RunConfig c = parse_config(slurp("fig_s2.ini"));
  EXPECT_EQ(c.command, Command::spectrum);
  EXPECT_EQ(c.units, UnitSystem::normalized);
  ASSERT_EQ(c.kind, SystemKind::two_body);
  ASSERT_EQ(c.modes.size(), 2u);
  EXPECT_EQ(c.modes[1], (ModeSpec{1.0, 0.0, 1e-7, 1.2, 6}));
  EXPECT_EQ(c.modes[0], (ModeSpec{1.0, 0.05, 1e-4, 1.2, 4}));
  EXPECT_EQ(c.g, 0.005);
  EXPECT_EQ(c.sweep.points, 401u);
  EXPECT_EQ(*c.sweep.start, 0.98);
  EXPECT_DOUBLE_EQ(c.drive_amplitude_or_default(), 1e-7);
  const TwoBodySystem s = two_body_system(c);
  EXPECT_DOUBLE_EQ(s.transmon.omega, 1.05);
}

TEST(ParseConfig, AnalyzeWithoutSweep) {
  const RunConfig c = parse_config(slurp("analyze.ini"));
  EXPECT_EQ(c.command, Command::analyze);
  EXPECT_FALSE(c.sweep.explicit_grid());
  EXPECT_NO_THROW(validate_for(c, Command::analyze));
  const std::string with_empty_sweep = slurp("analyze.ini") + "\n[sweep]\n";
  EXPECT_NO_THROW(validate_for(parse_config(with_empty_sweep), Command::analyze));
}

TEST(ParseConfig, FigS7InSI) {
  const RunConfig c = parse_config(slurp("fig_s7.ini"));
  EXPECT_EQ(c.units, UnitSystem::SI);
  ASSERT_EQ(c.kind, SystemKind::three_body);
  EXPECT_EQ(c.modes[2].omega, 85e6);
  EXPECT_EQ(c.modes[0].omega, 5e9);
  EXPECT_EQ(c.modes[1].anharmonicity, 225e3);
  EXPECT_EQ(c.g, 2e6);
  EXPECT_EQ(c.chi_LH, 15e6);
  EXPECT_EQ(c.driven_mode, 0u);
}

TEST(ParseConfig, AllShippedConfigsParse) {
  for (const char* name : {"fig_s2.ini", "fig_s4.ini", "chi_g_A.ini", "g_A_chi.ini", "A_chi_g.ini", "fig_s7.ini",
                           "equiv.ini", "couple.ini", "analyze.ini", "qtable.ini"}) {
    ScopedWarningHandler quiet([](std::string_view) {});
    const RunConfig c = parse_config(slurp(name));
    ASSERT_TRUE(c.command) << name;
    EXPECT_NO_THROW(validate_for(c, *c.command)) << name;
  }
}

TEST(ParseConfig, TwoPiPrefix) {
  const RunConfig c = parse_config(slurp("analyze.ini"));
  EXPECT_DOUBLE_EQ(*c.analysis.omega_t_prime, 2.0 * constants::pi * 6e9);
}

TEST(ParseConfig, FieldLevelErrors) {
  const std::string base = kMinimal;
  EXPECT_EQ(field_of(base + "bogus = 1\n"), "couplings.bogus");
  EXPECT_EQ(field_of(base + "[nonsense]\n"), "nonsense");
  std::string bad_number = base;
  bad_number.replace(bad_number.find("0.001"), 5, "0.0x1");
  EXPECT_EQ(field_of(bad_number), "couplings.g");
  std::string missing = base;
  missing.erase(missing.find("mech.N = 2\n"), 11);
  EXPECT_EQ(field_of(missing), "modes.mech.N");
  EXPECT_EQ(field_of(base + "[sweep]\nstart = 1\n"), "sweep.stop");
  EXPECT_EQ(field_of(base + "[sweep]\nstart = 1\nstop = 0.5\n"), "sweep.stop");
  EXPECT_EQ(field_of(base + "[sweep]\npoints = 1\n"), "sweep.points");
  EXPECT_EQ(field_of(base + "[drive]\nmode = mech\n"), "drive.mode");
  EXPECT_EQ(field_of(base + "[drive]\namplitude = -1\n"), "drive.amplitude");
  EXPECT_EQ(field_of(std::string("[run]\ncommand = plot\n")), "run.command");
  std::string negative_gamma = base;
  negative_gamma.replace(negative_gamma.find("1e-6"), 4, "-1e-6");
  EXPECT_EQ(field_of(negative_gamma), "modes.mech.gamma");
}

TEST(ParseConfig, UnitMixingRejected) {
  const std::string base = kMinimal;
  EXPECT_EQ(field_of(base + "[mechanics]\nmass = 1e-13\nomega = 1e7\nplate_area = 1e-10\ngap = 5e-8\n"),
            "mechanics");
  EXPECT_EQ(field_of(base + "[membrane:x]\nomega = 1e7\nC_d = 1e-15\n"), "membrane:x");
  std::string no_reference = base;
  no_reference.replace(no_reference.find("transmon.omega = 1"), 18, "transmon.omega = 2");
  EXPECT_EQ(field_of(no_reference), "units.system");
  const RunConfig c = parse_config(kMinimal);
  EXPECT_THROW(validate_for(c, Command::equiv), ConfigError);
  EXPECT_THROW(validate_for(c, Command::qtable), ConfigError);
}

TEST(ParseConfig, NormalizedValuesInSiWarn) {
  std::string si = kMinimal;
  si.replace(si.find("normalized"), 10, "SI");
  std::vector<std::string> seen;
  ScopedWarningHandler h([&](std::string_view m) { seen.emplace_back(m); });
  parse_config(si);
  EXPECT_EQ(seen.size(), 1u);
}

TEST(EmitConfig, RoundTrip) {
  for (const char* name : {"fig_s2.ini", "fig_s4.ini", "chi_g_A.ini", "g_A_chi.ini", "A_chi_g.ini", "fig_s7.ini",
                           "equiv.ini", "couple.ini", "analyze.ini", "qtable.ini"}) {
    ScopedWarningHandler quiet([](std::string_view) {});
    const RunConfig c = parse_config(slurp(name));
    const std::string emitted = emit_config(c);
    EXPECT_EQ(parse_config(emitted), c) << name << "\n" << emitted;
    EXPECT_EQ(emit_config(parse_config(emitted)), emitted) << name;
  }
}

TEST(Emit, SpectrumCsvShape) {
  RunConfig c = parse_config(kMinimal);
  c.sweep.start = 0.995;
  c.sweep.stop = 1.005;
  c.sweep.points = 401;
  const std::string csv = run_command(c, Command::spectrum);
  EXPECT_EQ(line_count(csv), 402u);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "omega_d,quad_re,quad_im,converged");
  EXPECT_EQ(csv, run_command(c, Command::spectrum)) << "output must be deterministic";
}

TEST(Emit, QtableColumns) {
  const RunConfig c = parse_config(slurp("qtable.ini"));
  const std::string csv = run_command(c, Command::qtable);
  EXPECT_EQ(line_count(csv), 5u);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "label,C_d,C_t,L_J,E_J,I_c,g_over_omega,n_th,Q");
  EXPECT_NE(csv.find("\n10MHz,"), std::string::npos);
}

TEST(Emit, EquivAtZeroBiasIsDecoupled) {
  std::string text = slurp("equiv.ini");
  text.replace(text.find("softening = 0.9"), 15, "V0 = 0");
  const std::string out = run_command(parse_config(text), Command::equiv);
  EXPECT_NE(out.find("decoupled = true"), std::string::npos) << out;
  const std::string biased = run_command(parse_config(slurp("equiv.ini")), Command::equiv);
  EXPECT_NE(biased.find("decoupled = false"), std::string::npos);
  EXPECT_NE(biased.find("softening_ratio = 0.9\n"), std::string::npos) << biased;
}

TEST(Emit, TwelveSignificantDigits) {
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(2.0 * constants::pi * 6e9), "37699111843.1");
}

TEST(RunCommand, AnalyzeReportsMinimumFrequency) {
  const std::string out = run_command(parse_config(slurp("analyze.ini")), Command::analyze);
  const auto pos = out.find("min_f_m0 = ");
  ASSERT_NE(pos, std::string::npos) << out;
  const double f = std::stod(out.substr(pos + 11));
  EXPECT_NEAR(f / 220e6, 1.0, 0.02);
}

TEST(RunCommand, CommandMismatch) {
  const RunConfig c = parse_config(slurp("analyze.ini"));
  EXPECT_THROW(run_command(c, Command::qtable), ConfigError);
}

TEST(RunCommand, CoupleReport) {
  const std::string out = run_command(parse_config(slurp("couple.ini")), Command::couple);
  EXPECT_NE(out.find("within_transmon_limit = true"), std::string::npos) << out;
  EXPECT_NE(out.find("regime = "), std::string::npos);
}
