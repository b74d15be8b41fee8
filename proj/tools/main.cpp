#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "kgm/cli.hpp"
#include "kgm/errors.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string out;
  std::string grid;
  std::string u_file, phi_file;
  long seed = -1;
  double tol = -1.0;
  bool physical_units = false;
};

void add_common(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--config", ov.config, "config file (key/value sections)");
  cmd->add_option("--seed", ov.seed, "random seed override");
  cmd->add_option("--out", ov.out, "output directory override");
  cmd->add_option("--tol", ov.tol, "inner solve tolerance override");
  cmd->add_option("--grid", ov.grid, "grid counts override NX,NY,NZ");
  cmd->add_flag("--physical-units", ov.physical_units,
                "report couplings in un-rescaled (4*pi) units");
}

kgm::cli::RunConfig build_config(const std::string& mode, const Overrides& ov) {
  kgm::cli::RunConfig cfg;
  if (!ov.config.empty()) cfg = kgm::cli::parse_config(ov.config);
  cfg.mode = kgm::cli::mode_from_name(mode);
  if (ov.seed >= 0) cfg.seed = static_cast<std::uint64_t>(ov.seed);
  if (!ov.out.empty()) cfg.out_dir = ov.out;
  if (ov.tol > 0.0) cfg.params.tol = ov.tol;
  if (ov.physical_units) cfg.physical_units = true;
  if (!ov.u_file.empty()) cfg.u_file = ov.u_file;
  if (!ov.phi_file.empty()) cfg.phi_file = ov.phi_file;
  if (!ov.grid.empty()) {
    int nx, ny, nz;
    if (std::sscanf(ov.grid.c_str(), "%d,%d,%d", &nx, &ny, &nz) != 3)
      throw kgm::ConfigError("--grid wants NX,NY,NZ");
    cfg.counts = {nx, ny, nz};
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Klein-Gordon-Maxwell box solver and verifier"};
  app.require_subcommand(1);

  Overrides ov;
  std::string report_path;

  CLI::App* solve_linear =
      app.add_subcommand("solve-linear", "minimize the reduced functional J");
  CLI::App* solve_nonlinear = app.add_subcommand(
      "solve-nonlinear", "mountain-pass search for the perturbed problem");
  CLI::App* multi =
      app.add_subcommand("multi", "deflated multistart over eigenmode seeds");
  CLI::App* verify =
      app.add_subcommand("verify", "run the certificate suite on stored fields");
  CLI::App* spectrum =
      app.add_subcommand("spectrum", "Dirichlet eigenvalues and smallness report");
  CLI::App* render = app.add_subcommand("render", "print a report as a table");

  for (CLI::App* cmd : {solve_linear, solve_nonlinear, multi, verify, spectrum})
    add_common(cmd, ov);
  verify->add_option("--u", ov.u_file, "matter field file");
  verify->add_option("--phi", ov.phi_file, "potential field file");
  render->add_option("report", report_path, "report.json to render")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (render->parsed()) return kgm::cli::report_render(report_path);
    const std::string mode = app.get_subcommands().front()->get_name();
    return kgm::cli::run(build_config(mode, ov));
  } catch (const kgm::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const kgm::SolverError& e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
