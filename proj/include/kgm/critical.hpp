#pragma once

#include <array>
#include <limits>
#include <string>
#include <vector>

#include "kgm/reduced.hpp"
#include "kgm/verify.hpp"

namespace kgm {

struct HistoryRow {
  long iter = 0;
  double value = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
};

// A candidate solution of the reduced problem together with its diagnostics.
struct CriticalPoint {
  ScalarField u;
  ScalarField phi;  // homogenized potential phi_u; physical potential is phi + chi
  ScalarField xi, eta;
  double value = 0.0;
  double grad_norm = 0.0;  // Sobolev (H^1_0-dual) norm of the weak residual
  double residual_matter = 0.0;
  double residual_potential = 0.0;
  bool nontrivial = false;
  bool converged = false;
  long iterations = 0;
  double barrier_rho = std::numeric_limits<double>::quiet_NaN();
  double barrier_alpha = std::numeric_limits<double>::quiet_NaN();
  std::vector<HistoryRow> history;
  std::vector<Certificate> certificates;
};

// Discrete path for the mountain-pass search: first point is 0, the last has
// a negative level.
struct PathState {
  std::vector<ScalarField> points;
  std::vector<double> values;
};

// Smallest Dirichlet eigenpairs of -Lap, by inverse power iteration with
// deflation. Mode index triples of the separated starts are kept for
// symmetry-aware seeding.
struct EigenModes {
  std::vector<double> values;
  std::vector<ScalarField> vectors;  // quadrature-orthonormal
  std::vector<std::array<int, 3>> triples;
};

EigenModes dirichlet_modes(const GridPtr& grid, int k, double tol);
double lambda1(const GridPtr& grid, double tol);
std::vector<double> lambda_k(const GridPtr& grid, int k, double tol);

struct SmallnessReport {
  bool linf_small = false;      // q ||chi||_inf <= m
  bool spectral_small = false;  // q^2 ||chi||_inf^2 < lambda_1 + m^2
  double threshold = 0.0;       // q^2 ||chi||_inf^2 - m^2
  int k = 1;                    // splitting index min{j : threshold < lambda_j}
  bool k_resolved = false;
  std::vector<double> lambdas;
};

// The splitting index needs the eigenvalue ladder, so the check takes the
// list computed by lambda_k (at least one entry).
SmallnessReport smallness_check(const LiftingPotential& lift, const Params& params,
                                const std::vector<double>& lambdas);

// Sobolev-gradient descent of J with Armijo backtracking. With kappa != 0 the
// functional blows up at 0, so the minimizer is nontrivial; with kappa = 0 the
// descent drives u below the trivial threshold and returns the trivial point.
CriticalPoint minimize_J(const LiftingPotential& lift, const Params& params,
                         const ScalarField& u0, double tol_grad, long max_iter);

// Scales `direction` by doubling until J_g goes negative.
ScalarField find_endpoint(const ScalarField& direction, const Nonlinearity& nl,
                          const LiftingPotential& lift, const Params& params);

// Numerical mountain pass: discrete path from 0 to find_endpoint(psi_1),
// descend the path maximizer one Sobolev step per iteration, reinsert,
// re-sort. Requires kappa = 0, a power nonlinearity and the spectral
// smallness condition.
CriticalPoint mountain_pass(const Nonlinearity& nl, const LiftingPotential& lift,
                            const Params& params, int n_path, double tol_grad,
                            long max_iter);

struct MultiOptions {
  int n_path = 21;
  long max_iter = 4000;
  double beta = 1.0;  // deflation constant
  int extra_seeds = 3;
  int first_seed = 0;  // skip the lowest eigenmode seeds (0-based)
};

struct MultiResult {
  std::vector<CriticalPoint> solutions;  // sorted by norm(u, gradL2)
  bool complete = false;
  std::string warning;
};

// Deflated multistart over eigenmode seeds psi_1, psi_2, ...; known solutions
// enter the descent metric through the penalty
//   prod_i (1 + beta / (||u - u_i||^2 ||u + u_i||^2)),
// sign pairs counting once. Returns up to n_targets distinct points.
MultiResult multi_solutions(const Nonlinearity& nl, const LiftingPotential& lift,
                            const Params& params, int n_targets, double tol_grad,
                            const MultiOptions& opts = {});

}  // namespace kgm
