#include "kgm/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kgm/errors.hpp"

namespace kgm {

namespace {

long default_cap(const Grid& g) {
  return static_cast<long>(20.0 * 100.0 * std::cbrt(static_cast<double>(g.node_count())));
}

double weighted_mean(const Grid& g, const std::vector<double>& v) {
  double s = 0.0;
  for (std::size_t n = 0; n < v.size(); ++n) s += g.volume_weight(n) * v[n];
  return s / g.volume();
}

void subtract_mean(const Grid& g, std::vector<double>& v) {
  const double m = weighted_mean(g, v);
  for (double& x : v) x -= m;
}

}  // namespace

NeumannOperator::NeumannOperator(GridPtr grid)
    : grid_(grid), screening_(ScalarField(grid, 0.0)) {}

NeumannOperator::NeumannOperator(GridPtr grid, ScalarField screening)
    : grid_(std::move(grid)), screening_(std::move(screening)) {
  if (screening_.grid()->node_count() != grid_->node_count())
    throw std::invalid_argument("screening field grid mismatch");
}

void NeumannOperator::apply(const ScalarField& x, ScalarField& y) const {
  const Grid& g = *grid_;
  const auto& c = g.counts();
  const auto& h = g.spacing();
  const double ix2 = 1.0 / (h[0] * h[0]);
  const double iy2 = 1.0 / (h[1] * h[1]);
  const double iz2 = 1.0 / (h[2] * h[2]);
  const int nx = c[0], ny = c[1], nz = c[2];
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const std::size_t id = g.index(i, j, k);
        const double v = x[id];
        double acc = 0.0;
        // Mirror ghosts double the inner neighbor at the end planes.
        if (i == 0)
          acc += 2.0 * (v - x[g.index(1, j, k)]) * ix2;
        else if (i == nx - 1)
          acc += 2.0 * (v - x[g.index(i - 1, j, k)]) * ix2;
        else
          acc += (2.0 * v - x[g.index(i - 1, j, k)] - x[g.index(i + 1, j, k)]) * ix2;
        if (j == 0)
          acc += 2.0 * (v - x[g.index(i, 1, k)]) * iy2;
        else if (j == ny - 1)
          acc += 2.0 * (v - x[g.index(i, j - 1, k)]) * iy2;
        else
          acc += (2.0 * v - x[g.index(i, j - 1, k)] - x[g.index(i, j + 1, k)]) * iy2;
        if (k == 0)
          acc += 2.0 * (v - x[g.index(i, j, 1)]) * iz2;
        else if (k == nz - 1)
          acc += 2.0 * (v - x[g.index(i, j, k - 1)]) * iz2;
        else
          acc += (2.0 * v - x[g.index(i, j, k - 1)] - x[g.index(i, j, k + 1)]) * iz2;
        y[id] = acc + screening_[id] * v;
      }
    }
  }
}

ScalarField NeumannOperator::apply(const ScalarField& x) const {
  ScalarField y(grid_);
  apply(x, y);
  return y;
}

double NeumannOperator::diagonal(std::size_t n) const {
  const auto& h = grid_->spacing();
  return 2.0 / (h[0] * h[0]) + 2.0 / (h[1] * h[1]) + 2.0 / (h[2] * h[2]) + screening_[n];
}

void apply_dirichlet_laplacian(const ScalarField& x, ScalarField& y) {
  const Grid& g = *x.grid();
  const auto& c = g.counts();
  const auto& h = g.spacing();
  const double ix2 = 1.0 / (h[0] * h[0]);
  const double iy2 = 1.0 / (h[1] * h[1]);
  const double iz2 = 1.0 / (h[2] * h[2]);
  for (std::size_t n : g.boundary_nodes()) y[n] = 0.0;
  for (int k = 1; k < c[2] - 1; ++k) {
    for (int j = 1; j < c[1] - 1; ++j) {
      for (int i = 1; i < c[0] - 1; ++i) {
        const std::size_t id = g.index(i, j, k);
        y[id] = (2.0 * x[id] - x[g.index(i - 1, j, k)] - x[g.index(i + 1, j, k)]) * ix2 +
                (2.0 * x[id] - x[g.index(i, j - 1, k)] - x[g.index(i, j + 1, k)]) * iy2 +
                (2.0 * x[id] - x[g.index(i, j, k - 1)] - x[g.index(i, j, k + 1)]) * iz2;
      }
    }
  }
}

ScalarField apply_dirichlet_laplacian(const ScalarField& x) {
  ScalarField y(x.grid());
  apply_dirichlet_laplacian(x, y);
  return y;
}

double grad_energy(const ScalarField& f) {
  const Grid& g = *f.grid();
  const auto& c = g.counts();
  const auto& h = g.spacing();
  double total = 0.0;
  // x-edges
  for (int k = 0; k < c[2]; ++k)
    for (int j = 0; j < c[1]; ++j) {
      const double wt = g.axis_weight(1, j) * g.axis_weight(2, k) / h[0];
      for (int i = 0; i + 1 < c[0]; ++i) {
        const double d = f[g.index(i + 1, j, k)] - f[g.index(i, j, k)];
        total += wt * d * d;
      }
    }
  // y-edges
  for (int k = 0; k < c[2]; ++k)
    for (int i = 0; i < c[0]; ++i) {
      const double wt = g.axis_weight(0, i) * g.axis_weight(2, k) / h[1];
      for (int j = 0; j + 1 < c[1]; ++j) {
        const double d = f[g.index(i, j + 1, k)] - f[g.index(i, j, k)];
        total += wt * d * d;
      }
    }
  // z-edges
  for (int j = 0; j < c[1]; ++j)
    for (int i = 0; i < c[0]; ++i) {
      const double wt = g.axis_weight(0, i) * g.axis_weight(1, j) / h[2];
      for (int k = 0; k + 1 < c[2]; ++k) {
        const double d = f[g.index(i, j, k + 1)] - f[g.index(i, j, k)];
        total += wt * d * d;
      }
    }
  return total;
}

namespace {

// One CG engine for both operators. `apply` must be self-adjoint positive
// (semi)definite in the weighted inner product; `diag` is its Jacobi
// preconditioner; `restrict_dirichlet` pins boundary entries to zero.
template <class Apply, class Diag>
ScalarField pcg_impl(const GridPtr& grid, const ScalarField& rhs, const PcgOptions& opts,
                     Apply&& apply, Diag&& diag, bool restrict_dirichlet,
                     SolveReport* report) {
  const Grid& g = *grid;
  const std::size_t n = g.node_count();
  const long cap = opts.max_iter > 0 ? opts.max_iter : default_cap(g);

  auto dot = [&](const ScalarField& a, const ScalarField& b) {
    double s = 0.0;
    for (std::size_t m = 0; m < n; ++m) s += g.volume_weight(m) * a[m] * b[m];
    return s;
  };

  ScalarField x = opts.initial_guess ? *opts.initial_guess : ScalarField(grid, 0.0);
  if (restrict_dirichlet) x.zero_boundary();
  if (opts.project_zero_mean) subtract_mean(g, x.values());

  ScalarField b = rhs;
  if (opts.project_zero_mean) subtract_mean(g, b.values());

  ScalarField r(grid), z(grid), p(grid), ap(grid);
  apply(x, ap);
  for (std::size_t m = 0; m < n; ++m) r[m] = b[m] - ap[m];
  if (restrict_dirichlet) r.zero_boundary();
  if (opts.project_zero_mean) subtract_mean(g, r.values());

  const double bnorm = std::sqrt(dot(b, b));
  const double stop = opts.tol * (bnorm > 0.0 ? bnorm : 1.0);
  double rnorm = std::sqrt(dot(r, r));

  SolveReport rep;
  if (rnorm <= stop) {
    rep.converged = true;
    rep.residual = bnorm > 0.0 ? rnorm / bnorm : rnorm;
    if (report) *report = rep;
    return x;
  }

  for (std::size_t m = 0; m < n; ++m) z[m] = r[m] / diag(m);
  if (restrict_dirichlet) z.zero_boundary();
  p = z;
  double rz = dot(r, z);

  for (long it = 1; it <= cap; ++it) {
    apply(p, ap);
    if (restrict_dirichlet) ap.zero_boundary();
    const double alpha = rz / dot(p, ap);
    for (std::size_t m = 0; m < n; ++m) {
      x[m] += alpha * p[m];
      r[m] -= alpha * ap[m];
    }
    if (opts.project_zero_mean) {
      subtract_mean(g, x.values());
      subtract_mean(g, r.values());
    }
    rnorm = std::sqrt(dot(r, r));
    rep.iterations = it;
    if (rnorm <= stop) {
      rep.converged = true;
      rep.residual = bnorm > 0.0 ? rnorm / bnorm : rnorm;
      if (report) *report = rep;
      return x;
    }
    for (std::size_t m = 0; m < n; ++m) z[m] = r[m] / diag(m);
    if (restrict_dirichlet) z.zero_boundary();
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t m = 0; m < n; ++m) p[m] = z[m] + beta * p[m];
  }
  rep.residual = bnorm > 0.0 ? rnorm / bnorm : rnorm;
  if (report) *report = rep;
  throw SolverError("pcg: iteration cap reached, residual " + std::to_string(rep.residual),
                    rep.residual, rep.iterations);
}

}  // namespace

ScalarField pcg_neumann(const NeumannOperator& op, const ScalarField& rhs,
                        const PcgOptions& opts, SolveReport* report) {
  return pcg_impl(
      op.grid(), rhs, opts, [&](const ScalarField& a, ScalarField& b) { op.apply(a, b); },
      [&](std::size_t m) { return op.diagonal(m); }, false, report);
}

ScalarField pcg_dirichlet(const ScalarField& rhs, const PcgOptions& opts,
                          SolveReport* report) {
  const auto& h = rhs.grid()->spacing();
  const double d = 2.0 / (h[0] * h[0]) + 2.0 / (h[1] * h[1]) + 2.0 / (h[2] * h[2]);
  return pcg_impl(
      rhs.grid(), rhs, opts,
      [&](const ScalarField& a, ScalarField& b) { apply_dirichlet_laplacian(a, b); },
      [&](std::size_t) { return d; }, true, report);
}

LiftingPotential solve_chi(const BoundaryData& h, double tol) {
  const GridPtr grid = h.grid();
  const Grid& g = *grid;
  const double kappa = h.kappa();

  // Weak form of  Lap chi = kappa, dchi/dn = h:
  // (-Lap_N) chi = -kappa + h * surface_weight / volume_weight on the boundary.
  // <rhs, 1> = -kappa |Omega| + int h dsigma = 0, so the singular system is
  // consistent; iterates are projected onto the zero-mean subspace.
  ScalarField rhs(grid, -kappa);
  const auto& bnodes = g.boundary_nodes();
  for (std::size_t b = 0; b < bnodes.size(); ++b)
    rhs[bnodes[b]] += h[b] * g.surface_weight(b) / g.volume_weight(bnodes[b]);

  NeumannOperator op(grid);
  PcgOptions opts;
  opts.tol = tol;
  opts.project_zero_mean = true;

  LiftingPotential lift;
  lift.chi = pcg_neumann(op, rhs, opts, &lift.report);
  subtract_mean(g, lift.chi.values());
  lift.kappa = kappa;
  lift.chi_max = *std::max_element(lift.chi.values().begin(), lift.chi.values().end());
  lift.chi_min = *std::min_element(lift.chi.values().begin(), lift.chi.values().end());
  lift.chi_inf = std::max(std::abs(lift.chi_max), std::abs(lift.chi_min));
  lift.chi_grad = std::sqrt(grad_energy(lift.chi));
  return lift;
}

double degenerate_screening_threshold(const Grid& grid) { return 1e-14 * grid.volume(); }

ScalarField solve_screened(const ScalarField& u, const ScalarField& rho, double q,
                           double tol, SolveReport* report,
                           const ScalarField* initial_guess) {
  const GridPtr grid = u.grid();
  ScalarField screening(grid);
  double mass = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n) {
    const double u2 = u[n] * u[n];
    screening[n] = q * q * u2;
    mass += grid->volume_weight(n) * u2;
  }
  if (!(mass > degenerate_screening_threshold(*grid)) || q == 0.0)
    throw std::invalid_argument(
        "solve_screened: degenerate screening (u vanishes); the operator kernel "
        "contains the constants and the problem is not uniquely solvable");

  NeumannOperator op(grid, std::move(screening));
  PcgOptions opts;
  opts.tol = tol;
  opts.initial_guess = initial_guess;
  return pcg_neumann(op, rho, opts, report);
}

ScalarField compute_xi(const ScalarField& u, const LiftingPotential& lift, double q,
                       double tol, SolveReport* report, const ScalarField* initial_guess) {
  const GridPtr grid = u.grid();
  ScalarField rhs(grid);
  for (std::size_t n = 0; n < u.size(); ++n)
    rhs[n] = -q * q * lift.chi[n] * u[n] * u[n];
  return solve_screened(u, rhs, q, tol, report, initial_guess);
}

ScalarField compute_eta(const ScalarField& u, double kappa, double q, double tol,
                        SolveReport* report, const ScalarField* initial_guess) {
  if (kappa == 0.0) {
    if (report) *report = SolveReport{0, 0.0, true};
    return ScalarField(u.grid(), 0.0);
  }
  ScalarField rhs(u.grid(), kappa);
  return solve_screened(u, rhs, q, tol, report, initial_guess);
}

std::tuple<ScalarField, ScalarField, ScalarField> compute_phi_u(
    const ScalarField& u, const LiftingPotential& lift, double q, double tol) {
  ScalarField xi = compute_xi(u, lift, q, tol);
  ScalarField eta = compute_eta(u, lift.kappa, q, tol);
  ScalarField phi = xi;
  phi += eta;
  return {std::move(phi), std::move(xi), std::move(eta)};
}

ScalarField gauge_shift(const ScalarField& phi, double omega, double q) {
  if (q == 0.0) throw std::invalid_argument("gauge_shift: q must be nonzero");
  ScalarField out = phi;
  const double shift = omega / q;
  for (std::size_t n = 0; n < out.size(); ++n) out[n] += shift;
  return out;
}

}  // namespace kgm
