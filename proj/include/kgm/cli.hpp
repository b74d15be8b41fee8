#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "kgm/critical.hpp"

namespace kgm::cli {

enum class Mode { solve_linear, solve_nonlinear, multi, verify, spectrum, render };

struct BoundarySpec {
  enum class Profile { constant, faces, dipole, cosine, file };
  Profile profile = Profile::constant;
  double amplitude = 0.0;
  int axis = 0;  // dipole axis
  std::array<double, 6> face_values{0, 0, 0, 0, 0, 0};
  std::string path;  // field file whose boundary trace provides h
};

struct RunConfig {
  Mode mode = Mode::verify;
  std::array<double, 3> lengths{1.0, 1.0, 1.0};
  std::array<int, 3> counts{17, 17, 17};
  Params params;
  BoundarySpec boundary;
  std::string nl_kind = "none";
  double nl_p = 4.0;
  long max_iter = 4000;
  int n_path = 21;
  int n_targets = 3;
  int eigen_k = 4;
  double beta = 1.0;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  bool physical_units = false;
  std::string u_file, phi_file;  // verify-mode inputs
  std::string report_file;       // render-mode input
};

// Parses the declarative key/value config (INI-style sections). Throws
// ConfigError with file:line diagnostics.
RunConfig parse_config(const std::string& path);

// Subcommand name -> mode ("solve-linear", "solve-nonlinear", "multi",
// "verify", "spectrum", "render").
Mode mode_from_name(const std::string& name);

// Mode-specific requirements (odd nonlinearity and mean-zero datum for
// multi, and so on). Throws ConfigError.
void validate(const RunConfig& config);

Nonlinearity make_nonlinearity(const RunConfig& config);
BoundaryData make_boundary(const RunConfig& config, const GridPtr& grid);

// Executes the configured mode, writing report.json, descent history CSV and
// solution field files under out_dir. Returns the process exit code:
// 0 success/all-pass, 1 certificate failure, 3 solver failure.
int run(const RunConfig& config);

// Renders a report file as a fixed-format table on stdout; returns 0 when
// every certificate passed, 1 otherwise.
int report_render(const std::string& report_path);

}  // namespace kgm::cli
