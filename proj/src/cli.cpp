#include "kgm/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kgm/errors.hpp"
#include "kgm/field_io.hpp"

namespace kgm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kFourPi = 4.0 * 3.14159265358979323846;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& v, const std::string& where) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(where + ": expected a number, got '" + v + "'");
  }
}

long to_long(const std::string& v, const std::string& where) {
  try {
    std::size_t pos = 0;
    const long d = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(where + ": expected an integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& v, const std::string& where) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(where + ": expected a boolean, got '" + v + "'");
}

std::vector<std::string> split_csv(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

int axis_from_name(const std::string& v, const std::string& where) {
  if (v == "x" || v == "0") return 0;
  if (v == "y" || v == "1") return 1;
  if (v == "z" || v == "2") return 2;
  throw ConfigError(where + ": expected axis x|y|z, got '" + v + "'");
}

std::string mode_name(Mode m) {
  switch (m) {
    case Mode::solve_linear: return "solve-linear";
    case Mode::solve_nonlinear: return "solve-nonlinear";
    case Mode::multi: return "multi";
    case Mode::verify: return "verify";
    case Mode::spectrum: return "spectrum";
    case Mode::render: return "render";
  }
  return "?";
}

}  // namespace

Mode mode_from_name(const std::string& name) {
  if (name == "solve-linear") return Mode::solve_linear;
  if (name == "solve-nonlinear") return Mode::solve_nonlinear;
  if (name == "multi") return Mode::multi;
  if (name == "verify") return Mode::verify;
  if (name == "spectrum") return Mode::spectrum;
  if (name == "render") return Mode::render;
  throw ConfigError("unknown mode '" + name + "'");
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);

  RunConfig cfg;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = path + ":" + std::to_string(lineno);
    std::string s = trim(line);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section != "grid" && section != "params" && section != "boundary" &&
          section != "nonlinearity" && section != "solver" && section != "output" &&
          section != "input" && section != "run")
        throw ConfigError(where + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));

    if (section == "grid") {
      if (key == "lengths") {
        const auto v = split_csv(value);
        if (v.size() != 3) throw ConfigError(where + ": lengths wants 3 values");
        for (int a = 0; a < 3; ++a) cfg.lengths[a] = to_double(v[a], where);
      } else if (key == "counts") {
        const auto v = split_csv(value);
        if (v.size() != 3) throw ConfigError(where + ": counts wants 3 values");
        for (int a = 0; a < 3; ++a) cfg.counts[a] = static_cast<int>(to_long(v[a], where));
      } else {
        throw ConfigError(where + ": unknown key '" + key + "' in [grid]");
      }
    } else if (section == "params") {
      if (key == "m") cfg.params.m = to_double(value, where);
      else if (key == "q") cfg.params.q = to_double(value, where);
      else if (key == "omega") cfg.params.omega = to_double(value, where);
      else throw ConfigError(where + ": unknown key '" + key + "' in [params]");
    } else if (section == "boundary") {
      if (key == "profile") {
        if (value == "constant") cfg.boundary.profile = BoundarySpec::Profile::constant;
        else if (value == "faces") cfg.boundary.profile = BoundarySpec::Profile::faces;
        else if (value == "dipole") cfg.boundary.profile = BoundarySpec::Profile::dipole;
        else if (value == "cosine") cfg.boundary.profile = BoundarySpec::Profile::cosine;
        else if (value == "file") cfg.boundary.profile = BoundarySpec::Profile::file;
        else throw ConfigError(where + ": unknown boundary profile '" + value + "'");
      } else if (key == "amplitude") {
        cfg.boundary.amplitude = to_double(value, where);
      } else if (key == "axis") {
        cfg.boundary.axis = axis_from_name(value, where);
      } else if (key == "values") {
        const auto v = split_csv(value);
        if (v.size() != 6)
          throw ConfigError(where + ": values wants 6 per-face constants");
        for (int f = 0; f < 6; ++f) cfg.boundary.face_values[f] = to_double(v[f], where);
      } else if (key == "path") {
        cfg.boundary.path = value;
      } else {
        throw ConfigError(where + ": unknown key '" + key + "' in [boundary]");
      }
    } else if (section == "nonlinearity") {
      if (key == "kind") {
        if (value != "none" && value != "power")
          throw ConfigError(where + ": unknown nonlinearity kind '" + value + "'");
        cfg.nl_kind = value;
      } else if (key == "p") {
        cfg.nl_p = to_double(value, where);
      } else {
        throw ConfigError(where + ": unknown key '" + key + "' in [nonlinearity]");
      }
    } else if (section == "solver") {
      if (key == "tol") cfg.params.tol = to_double(value, where);
      else if (key == "tol_grad") cfg.params.tol_grad = to_double(value, where);
      else if (key == "max_iter") cfg.max_iter = to_long(value, where);
      else if (key == "n_path") cfg.n_path = static_cast<int>(to_long(value, where));
      else if (key == "n_targets") cfg.n_targets = static_cast<int>(to_long(value, where));
      else if (key == "eigen_k") cfg.eigen_k = static_cast<int>(to_long(value, where));
      else if (key == "beta") cfg.beta = to_double(value, where);
      else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_long(value, where));
      else throw ConfigError(where + ": unknown key '" + key + "' in [solver]");
    } else if (section == "output") {
      if (key == "dir") cfg.out_dir = value;
      else if (key == "physical_units") cfg.physical_units = to_bool(value, where);
      else throw ConfigError(where + ": unknown key '" + key + "' in [output]");
    } else if (section == "input") {
      if (key == "u") cfg.u_file = value;
      else if (key == "phi") cfg.phi_file = value;
      else if (key == "report") cfg.report_file = value;
      else throw ConfigError(where + ": unknown key '" + key + "' in [input]");
    } else if (section == "run") {
      if (key == "mode") cfg.mode = mode_from_name(value);
      else throw ConfigError(where + ": unknown key '" + key + "' in [run]");
    } else {
      throw ConfigError(where + ": key outside any section");
    }
  }
  return cfg;
}

Nonlinearity make_nonlinearity(const RunConfig& config) {
  if (config.nl_kind == "none") return Nonlinearity::none();
  try {
    return Nonlinearity::power(config.nl_p);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("nonlinearity: ") + e.what());
  }
}

BoundaryData make_boundary(const RunConfig& config, const GridPtr& grid) {
  const Grid& g = *grid;
  BoundaryData h(grid);
  switch (config.boundary.profile) {
    case BoundarySpec::Profile::constant:
      for (std::size_t b = 0; b < h.size(); ++b) h[b] = config.boundary.amplitude;
      break;
    case BoundarySpec::Profile::faces:
      for (std::size_t b = 0; b < h.size(); ++b)
        h[b] = config.boundary.face_values[static_cast<int>(g.face_id(b))];
      break;
    case BoundarySpec::Profile::dipole: {
      const int ax = config.boundary.axis;
      const Face lo = static_cast<Face>(2 * ax);
      const Face hi = static_cast<Face>(2 * ax + 1);
      for (std::size_t b = 0; b < h.size(); ++b) {
        const auto c = g.coords(g.boundary_nodes()[b]);
        if (c[ax] == 0 && g.face_id(b) == lo)
          h[b] = -config.boundary.amplitude;
        else if (c[ax] == g.counts()[ax] - 1 && g.face_id(b) == hi)
          h[b] = config.boundary.amplitude;
        else
          h[b] = 0.0;
      }
      break;
    }
    case BoundarySpec::Profile::cosine: {
      // Product of cosines over the tangential axes of the canonical face;
      // mean-zero on every face.
      for (std::size_t b = 0; b < h.size(); ++b) {
        const std::size_t n = g.boundary_nodes()[b];
        const auto pos = g.position(n);
        const int normal = static_cast<int>(g.face_id(b)) / 2;
        double v = config.boundary.amplitude;
        for (int a = 0; a < 3; ++a) {
          if (a == normal) continue;
          v *= std::cos(3.14159265358979323846 * pos[a] / g.lengths()[a]);
        }
        h[b] = v;
      }
      break;
    }
    case BoundarySpec::Profile::file: {
      ScalarField f = read_field(config.boundary.path, grid);
      for (std::size_t b = 0; b < h.size(); ++b) h[b] = f[g.boundary_nodes()[b]];
      break;
    }
  }
  return h;
}

void validate(const RunConfig& config) {
  for (int a = 0; a < 3; ++a) {
    if (!(config.lengths[a] > 0.0)) throw ConfigError("grid lengths must be positive");
    if (config.counts[a] < 3) throw ConfigError("grid counts must be >= 3");
  }
  if (!(config.params.m > 0.0)) throw ConfigError("params: m must be positive");
  if (!(config.params.tol > 0.0) || !(config.params.tol_grad > 0.0))
    throw ConfigError("solver: tolerances must be positive");

  const bool has_nl = config.nl_kind != "none";
  if (has_nl && !(config.nl_p > 2.0 && config.nl_p < 6.0))
    throw ConfigError("nonlinearity: p must lie in (2,6)");

  switch (config.mode) {
    case Mode::solve_linear:
      if (config.params.q == 0.0)
        throw ConfigError("solve-linear: q must be nonzero (coupled system)");
      break;
    case Mode::solve_nonlinear:
    case Mode::multi: {
      if (!has_nl)
        throw ConfigError(mode_name(config.mode) + ": needs a power nonlinearity");
      // Mean-zero requirement: int h dsigma = 0 up to quadrature roundoff.
      const GridPtr grid = Grid::make(config.lengths, config.counts);
      const BoundaryData h = make_boundary(config, grid);
      if (h.kappa() != 0.0)
        throw ConfigError(mode_name(config.mode) +
                          ": boundary datum must be mean-zero (int h dsigma = 0)");
      break;
    }
    case Mode::verify:
    case Mode::spectrum:
      break;
    case Mode::render:
      if (config.report_file.empty())
        throw ConfigError("render: needs a report file ([input] report = ...)");
      break;
  }
}

namespace {

json grid_json(const Grid& g) {
  return json{{"lengths", g.lengths()}, {"counts", g.counts()}, {"spacing", g.spacing()}};
}

json params_json(const RunConfig& cfg) {
  return json{{"m", cfg.params.m},       {"q", cfg.params.q},
              {"omega", cfg.params.omega}, {"tol", cfg.params.tol},
              {"tol_grad", cfg.params.tol_grad}, {"seed", cfg.seed}};
}

json certificate_json(const Certificate& c) {
  return json{{"name", c.name},
              {"passed", c.passed},
              {"measured", c.measured},
              {"tolerance", c.tolerance},
              {"context", c.context}};
}

json boundary_json(const RunConfig& cfg, const BoundaryData& h,
                   const LiftingPotential& lift) {
  double h_inf = 0.0;
  for (std::size_t b = 0; b < h.size(); ++b) h_inf = std::max(h_inf, std::abs(h[b]));
  json out{{"kappa", lift.kappa},
           {"chi_inf", lift.chi_inf},
           {"chi_min", lift.chi_min},
           {"chi_max", lift.chi_max},
           {"chi_grad", lift.chi_grad},
           {"h_inf", h_inf},
           {"int_h", boundary_integral(h)},
           {"chi_solve_iterations", lift.report.iterations}};
  // Measured analogue of the lifting regularity ratio; reported, never
  // asserted (the constant is domain-dependent).
  out["chi_inf_over_h_inf"] = h_inf > 0.0 ? lift.chi_inf / h_inf : 0.0;
  switch (cfg.boundary.profile) {
    case BoundarySpec::Profile::constant: out["profile"] = "constant"; break;
    case BoundarySpec::Profile::faces: out["profile"] = "faces"; break;
    case BoundarySpec::Profile::dipole: out["profile"] = "dipole"; break;
    case BoundarySpec::Profile::cosine: out["profile"] = "cosine"; break;
    case BoundarySpec::Profile::file: out["profile"] = "file"; break;
  }
  out["amplitude"] = cfg.boundary.amplitude;
  return out;
}

json point_json(const CriticalPoint& cp) {
  json out{{"value", cp.value},
           {"grad_norm", cp.grad_norm},
           {"residual_matter", cp.residual_matter},
           {"residual_potential", cp.residual_potential},
           {"nontrivial", cp.nontrivial},
           {"converged", cp.converged},
           {"iterations", cp.iterations},
           {"u_l2", norm(cp.u, NormKind::L2)},
           {"u_gradl2", norm(cp.u, NormKind::gradL2)},
           {"u_linf", norm(cp.u, NormKind::Linf)}};
  if (std::isfinite(cp.barrier_alpha)) {
    out["barrier_alpha"] = cp.barrier_alpha;
    out["barrier_rho"] = cp.barrier_rho;
  }
  return out;
}

json smallness_json(const SmallnessReport& rep) {
  return json{{"linf_small", rep.linf_small},
              {"spectral_small", rep.spectral_small},
              {"threshold", rep.threshold},
              {"k", rep.k},
              {"k_resolved", rep.k_resolved},
              {"lambdas", rep.lambdas}};
}

void write_history_csv(const std::string& path, const std::vector<HistoryRow>& rows) {
  std::ofstream out(path);
  out << "iter,value,grad_norm,step\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%ld,%.17g,%.17g,%.17g\n", r.iter, r.value,
                  r.grad_norm, r.step);
    out << buf;
  }
}

void write_report(const std::string& out_dir, const json& report) {
  std::ofstream out(out_dir + "/report.json");
  out << report.dump(2) << "\n";
}

std::vector<double> default_t_grid() {
  std::vector<double> t;
  for (double v = 0.1; v <= 10.0 + 1e-12; v += 0.3) {
    t.push_back(v);
    t.push_back(-v);
  }
  return t;
}

}  // namespace

int run(const RunConfig& config) {
  validate(config);
  if (config.mode == Mode::render) return report_render(config.report_file);

  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(config.out_dir);

  const GridPtr grid = Grid::make(config.lengths, config.counts);
  const BoundaryData h = make_boundary(config, grid);
  const Nonlinearity nl = make_nonlinearity(config);
  const LiftingPotential lift = solve_chi(h, config.params.tol);

  json report;
  report["mode"] = mode_name(config.mode);
  report["grid"] = grid_json(*grid);
  report["params"] = params_json(config);
  report["boundary"] = boundary_json(config, h, lift);
  if (config.physical_units) {
    report["units"] = json{
        {"physical", true},
        {"q_physical", config.params.q / std::sqrt(kFourPi)},
        {"note",
         "internal fields solve the rescaled system (4*pi omitted); a solution "
         "with coupling q corresponds to the physical coupling q/sqrt(4*pi)"}};
  } else {
    report["units"] = json{{"physical", false}};
  }

  std::vector<Certificate> certs;
  int exit_code = 0;

  try {
    switch (config.mode) {
      case Mode::solve_linear: {
        EigenModes modes = dirichlet_modes(grid, 1, 1e-8);
        const SmallnessReport small = smallness_check(lift, config.params, modes.values);
        report["smallness"] = smallness_json(small);
        ScalarField u0 = modes.vectors[0];
        CriticalPoint cp =
            minimize_J(lift, config.params, u0, config.params.tol_grad, config.max_iter);
        report["result"] = point_json(cp);
        write_history_csv(config.out_dir + "/history.csv", cp.history);
        write_field(config.out_dir + "/u.field", cp.u);
        write_field(config.out_dir + "/phi.field", cp.phi);
        ScalarField phi_phys = cp.phi;
        phi_phys += lift.chi;
        write_field(config.out_dir + "/phi_physical.field", phi_phys);
        if (config.params.omega != 0.0)
          write_field(config.out_dir + "/phi_standing.field",
                      gauge_shift(phi_phys, config.params.omega, config.params.q));
        certs = cp.certificates;
        certs.push_back(check_necessary(cp.u, phi_phys, h, config.params));
        const bool maxok = maximizer_check(cp.u, cp.phi, lift, config.params, 8,
                                           config.seed);
        certs.push_back(make_certificate("maximizer", maxok ? 0.0 : -1.0, 0.0,
                                         "8 random perturbations"));
        certs.push_back(make_certificate(
            "grad_norm", config.params.tol_grad - cp.grad_norm, 0.0,
            "Sobolev dual norm"));
        const double rtol = 10.0 * config.params.tol_grad;
        certs.push_back(make_certificate("residual_matter",
                                         rtol - cp.residual_matter, 0.0,
                                         "quadrature norm"));
        certs.push_back(make_certificate("residual_potential",
                                         rtol - cp.residual_potential, 0.0,
                                         "quadrature norm"));
        break;
      }
      case Mode::solve_nonlinear: {
        CriticalPoint cp = mountain_pass(nl, lift, config.params, config.n_path,
                                         config.params.tol_grad, config.max_iter);
        report["result"] = point_json(cp);
        write_history_csv(config.out_dir + "/history.csv", cp.history);
        write_field(config.out_dir + "/u.field", cp.u);
        write_field(config.out_dir + "/phi.field", cp.phi);
        ScalarField phi_phys = cp.phi;
        phi_phys += lift.chi;
        write_field(config.out_dir + "/phi_physical.field", phi_phys);
        if (config.params.omega != 0.0 && config.params.q != 0.0)
          write_field(config.out_dir + "/phi_standing.field",
                      gauge_shift(phi_phys, config.params.omega, config.params.q));
        certs = cp.certificates;
        certs.push_back(check_necessary(cp.u, phi_phys, h, config.params));
        certs.push_back(make_certificate(
            "grad_norm", config.params.tol_grad - cp.grad_norm, 0.0,
            "Sobolev dual norm"));
        const double rtol = 10.0 * config.params.tol_grad;
        certs.push_back(make_certificate("residual_matter",
                                         rtol - cp.residual_matter, 0.0,
                                         "quadrature norm"));
        certs.push_back(make_certificate("residual_potential",
                                         rtol - cp.residual_potential, 0.0,
                                         "quadrature norm"));
        auto growth = check_growth_conditions(nl, default_t_grid());
        certs.insert(certs.end(), growth.begin(), growth.end());
        EigenModes modes = dirichlet_modes(grid, 1, 1e-8);
        report["smallness"] =
            smallness_json(smallness_check(lift, config.params, modes.values));
        break;
      }
      case Mode::multi: {
        MultiOptions mo;
        mo.n_path = config.n_path;
        mo.max_iter = config.max_iter;
        mo.beta = config.beta;
        MultiResult res = multi_solutions(nl, lift, config.params, config.n_targets,
                                          config.params.tol_grad, mo);
        json sols = json::array();
        for (std::size_t i = 0; i < res.solutions.size(); ++i) {
          const CriticalPoint& cp = res.solutions[i];
          const std::string dir =
              config.out_dir + "/sol_" + std::to_string(i + 1);
          fs::create_directories(dir);
          write_field(dir + "/u.field", cp.u);
          write_field(dir + "/phi.field", cp.phi);
          write_history_csv(dir + "/history.csv", cp.history);
          sols.push_back(point_json(cp));
          for (const Certificate& c : cp.certificates)
            if (c.name == "unifbound") {
              Certificate tagged = c;
              tagged.name = "unifbound_sol_" + std::to_string(i + 1);
              certs.push_back(tagged);
            }
        }
        report["solutions"] = sols;
        report["complete"] = res.complete;
        if (!res.warning.empty()) report["warning"] = res.warning;
        if (!res.complete) exit_code = 3;
        break;
      }
      case Mode::spectrum: {
        EigenModes modes = dirichlet_modes(grid, config.eigen_k, 1e-8);
        report["eigenvalues"] = modes.values;
        json triples = json::array();
        for (const auto& t : modes.triples) triples.push_back(t);
        report["mode_triples"] = triples;
        report["smallness"] =
            smallness_json(smallness_check(lift, config.params, modes.values));
        break;
      }
      case Mode::verify: {
        ScalarField u = config.u_file.empty() ? ScalarField(grid, 0.0)
                                              : read_field(config.u_file, grid);
        ScalarField phi = config.phi_file.empty() ? ScalarField(grid, 0.0)
                                                  : read_field(config.phi_file, grid);
        auto [r1, r2] = residual_system(u, phi, lift, config.params, nl);
        const double rtol = 10.0 * config.params.tol_grad;
        certs.push_back(make_certificate("residual_matter", rtol - r1, 0.0,
                                         "quadrature norm"));
        certs.push_back(make_certificate("residual_potential", rtol - r2, 0.0,
                                         "quadrature norm"));
        ScalarField phi_phys = phi;
        phi_phys += lift.chi;
        certs.push_back(check_necessary(u, phi_phys, h, config.params));
        // The rigidity identity is a statement about the unperturbed system;
        // a nonlinear solution legitimately violates it.
        if (lift.kappa == 0.0 && nl.kind == Nonlinearity::Kind::none)
          certs.push_back(check_nonexistence_identity(u, phi, lift, config.params));
        if (norm(u, NormKind::L2) >= trivial_threshold(*grid, config.params) &&
            config.params.q != 0.0) {
          auto lemma = check_lemma_suite(u, lift, config.params);
          certs.insert(certs.end(), lemma.begin(), lemma.end());
        }
        if (nl.kind != Nonlinearity::Kind::none) {
          auto growth = check_growth_conditions(nl, default_t_grid());
          certs.insert(certs.end(), growth.begin(), growth.end());
        }
        break;
      }
      case Mode::render:
        break;  // handled above
    }
  } catch (const SolverError& e) {
    report["error"] = e.what();
    report["error_residual"] = e.residual;
    report["error_iterations"] = e.iterations;
    exit_code = 3;
  }

  json jcerts = json::array();
  for (const Certificate& c : certs) jcerts.push_back(certificate_json(c));
  report["certificates"] = jcerts;
  const bool ok = all_passed(certs);
  report["all_passed"] = ok;
  if (exit_code == 0 && !ok) exit_code = 1;

  const auto t1 = std::chrono::steady_clock::now();
  report["timings"] = json{
      {"total_seconds", std::chrono::duration<double>(t1 - t0).count()}};
  write_report(config.out_dir, report);
  return exit_code;
}

int report_render(const std::string& report_path) {
  std::ifstream in(report_path);
  if (!in) throw ConfigError("render: cannot open report " + report_path);
  json report;
  try {
    in >> report;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("render: malformed report: ") + e.what());
  }

  char buf[256];
  std::printf("mode: %s\n", report.value("mode", std::string("?")).c_str());
  if (report.contains("grid")) {
    const auto& g = report["grid"];
    std::printf("grid: %dx%dx%d  lengths %.6g,%.6g,%.6g\n", g["counts"][0].get<int>(),
                g["counts"][1].get<int>(), g["counts"][2].get<int>(),
                g["lengths"][0].get<double>(), g["lengths"][1].get<double>(),
                g["lengths"][2].get<double>());
  }
  if (report.contains("boundary")) {
    const auto& b = report["boundary"];
    std::printf("boundary: %s  kappa=%.6g  |chi|_inf=%.6g\n",
                b.value("profile", std::string("?")).c_str(),
                b.value("kappa", 0.0), b.value("chi_inf", 0.0));
  }
  if (report.contains("result")) {
    const auto& r = report["result"];
    std::printf("result: value=%.6g grad_norm=%.6g residuals=%.6g/%.6g nontrivial=%s\n",
                r.value("value", 0.0), r.value("grad_norm", 0.0),
                r.value("residual_matter", 0.0), r.value("residual_potential", 0.0),
                r.value("nontrivial", false) ? "yes" : "no");
  }
  if (report.contains("solutions")) {
    std::printf("solutions:\n");
    int i = 0;
    for (const auto& s : report["solutions"]) {
      std::printf("  %2d  value=%-12.6g |grad u|_2=%-12.6g grad_norm=%.6g\n", ++i,
                  s.value("value", 0.0), s.value("u_gradl2", 0.0),
                  s.value("grad_norm", 0.0));
    }
  }
  if (report.contains("eigenvalues")) {
    std::printf("eigenvalues:");
    for (const auto& v : report["eigenvalues"]) std::printf(" %.6g", v.get<double>());
    std::printf("\n");
  }
  if (report.contains("error"))
    std::printf("error: %s\n", report["error"].get<std::string>().c_str());

  std::printf("%-22s %-14s %-14s %s\n", "certificate", "measured", "tolerance",
              "status");
  bool all_ok = true;
  if (report.contains("certificates")) {
    for (const auto& c : report["certificates"]) {
      const bool passed = c.value("passed", false);
      all_ok = all_ok && passed;
      std::snprintf(buf, sizeof(buf), "%-22s %-14.6g %-14.6g %s",
                    c.value("name", std::string("?")).c_str(), c.value("measured", 0.0),
                    c.value("tolerance", 0.0), passed ? "PASS" : "FAIL");
      std::printf("%s\n", buf);
    }
  }
  all_ok = all_ok && report.value("all_passed", true);
  std::printf("all passed: %s\n", all_ok ? "yes" : "no");
  return all_ok ? 0 : 1;
}

}  // namespace kgm::cli
