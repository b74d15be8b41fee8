#pragma once

#include <optional>
#include <tuple>

#include "kgm/mesh.hpp"

namespace kgm {

// Discrete -Laplace + screening with zero-flux (mirror ghost) closure on all
// faces. Self-adjoint and positive semidefinite in the volume-quadrature
// inner product; strictly definite once integrate(screening) > 0.
class NeumannOperator {
public:
  explicit NeumannOperator(GridPtr grid);
  NeumannOperator(GridPtr grid, ScalarField screening);

  const GridPtr& grid() const { return grid_; }
  const ScalarField& screening() const { return screening_; }

  void apply(const ScalarField& x, ScalarField& y) const;
  ScalarField apply(const ScalarField& x) const;
  double diagonal(std::size_t n) const;

private:
  GridPtr grid_;
  ScalarField screening_;
};

// -Laplace with homogeneous Dirichlet rows: output is the 7-point stencil at
// interior nodes and 0 at boundary nodes. Inputs are expected conforming.
void apply_dirichlet_laplacian(const ScalarField& x, ScalarField& y);
ScalarField apply_dirichlet_laplacian(const ScalarField& x);

// <(-Lap_N) f, f> under the volume quadrature, evaluated as the exact sum
// over grid edges of transverse-weights/spacing times squared differences.
// Coincides with the Dirichlet form for conforming fields. This is the
// discrete ||grad f||_2^2 used by the energy functionals.
double grad_energy(const ScalarField& f);

struct SolveReport {
  long iterations = 0;
  double residual = 0.0;  // relative, in the quadrature norm
  bool converged = false;
};

struct PcgOptions {
  double tol = 1e-10;
  long max_iter = 0;  // 0: 20 * 100 * cbrt(node count)
  bool project_zero_mean = false;
  const ScalarField* initial_guess = nullptr;
};

// Preconditioned CG (Jacobi) in the quadrature inner product.
// Throws SolverError when the cap is reached before tolerance.
ScalarField pcg_neumann(const NeumannOperator& op, const ScalarField& rhs,
                        const PcgOptions& opts, SolveReport* report = nullptr);

// Same engine for the Dirichlet operator; rhs and result are conforming.
ScalarField pcg_dirichlet(const ScalarField& rhs, const PcgOptions& opts,
                          SolveReport* report = nullptr);

// Zero-mean solution of  Lap chi = kappa,  dchi/dn = h; the compatibility
// constant kappa is derived from h, so the singular Neumann system is
// consistent by construction.
struct LiftingPotential {
  ScalarField chi;
  double kappa = 0.0;
  double chi_inf = 0.0;   // ||chi||_inf
  double chi_grad = 0.0;  // sqrt(grad_energy(chi))
  double chi_max = 0.0;
  double chi_min = 0.0;
  SolveReport report;
};

LiftingPotential solve_chi(const BoundaryData& h, double tol);

// Unique solution of  -Lap phi + q^2 u^2 phi = rho  with zero flux.
// Refuses degenerate screening (integrate(u^2) below threshold): the operator
// kernel then contains the constants and the problem loses uniqueness.
ScalarField solve_screened(const ScalarField& u, const ScalarField& rho, double q,
                           double tol, SolveReport* report = nullptr,
                           const ScalarField* initial_guess = nullptr);

// Threshold below which u counts as identically zero for the screened solve.
double degenerate_screening_threshold(const Grid& grid);

// xi_u: Lap xi - q^2 xi u^2 = q^2 chi u^2, zero flux.
ScalarField compute_xi(const ScalarField& u, const LiftingPotential& lift, double q,
                       double tol, SolveReport* report = nullptr,
                       const ScalarField* initial_guess = nullptr);

// eta_u: Lap eta - q^2 eta u^2 = -kappa, zero flux.
ScalarField compute_eta(const ScalarField& u, double kappa, double q, double tol,
                        SolveReport* report = nullptr,
                        const ScalarField* initial_guess = nullptr);

// phi_u = xi_u + eta_u, the unique zero-flux solution of
// Lap phi = q^2 (phi + chi) u^2 - kappa.
std::tuple<ScalarField, ScalarField, ScalarField> compute_phi_u(
    const ScalarField& u, const LiftingPotential& lift, double q, double tol);

// Reconstructs the standing-wave potential of frequency omega: phi + omega/q.
ScalarField gauge_shift(const ScalarField& phi, double omega, double q);

}  // namespace kgm
