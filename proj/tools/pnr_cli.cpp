// pnr <equiv|couple|analyze|qtable|spectrum> --config <file> [--out <path>] [--format csv|report]
//
// Exit codes: 0 success, 2 configuration or input error, 3 solver failure, 1 anything else.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pnr/pipeline.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kSolverError = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw pnr::ConfigError("--config", "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phonon-number resolution models: equivalent circuits, couplings, bounds and spectra"};
  std::string command;
  std::string config_path;
  std::string out_path;
  std::string format;
  app.add_option("command", command, "equiv | couple | analyze | qtable | spectrum")
      ->required()
      ->check(CLI::IsMember({"equiv", "couple", "analyze", "qtable", "spectrum"}));
  app.add_option("--config", config_path, "configuration file")->required();
  app.add_option("--out", out_path, "output file (default: stdout)");
  app.add_option("--format", format, "csv or report")->check(CLI::IsMember({"csv", "report"}));
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    const pnr::RunConfig cfg = pnr::parse_config(read_file(config_path));
    std::optional<pnr::OutputFormat> fmt;
    if (format == "csv") fmt = pnr::OutputFormat::csv;
    if (format == "report") fmt = pnr::OutputFormat::report;
    const std::string text = pnr::run_command(cfg, *pnr::parse_command(command), fmt);

    const std::string target = !out_path.empty() ? out_path : cfg.output_path.value_or("");
    if (target.empty() || target == "-") {
      std::cout << text;
    } else {
      std::ofstream out(target);
      if (!out || !(out << text) || !out.flush()) {
        std::cerr << "error: cannot write '" << target << "'\n";
        return 1;
      }
    }
  } catch (const pnr::SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    if (e.residual() >= 0.0) std::cerr << "residual: " << e.residual() << '\n';
    return kSolverError;
  } catch (const pnr::InstabilityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const pnr::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
