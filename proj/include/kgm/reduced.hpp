#pragma once

#include <optional>

#include "kgm/elliptic.hpp"
#include "kgm/mesh.hpp"

namespace kgm {

struct Params {
  double m = 1.0;      // mass, > 0
  double q = 0.1;      // coupling; 0 only for decoupled cross-check runs
  double omega = 0.0;  // frequency; enters through gauge_shift only
  double tol = 1e-10;       // relative tolerance of the inner elliptic solves
  double tol_grad = 1e-6;   // critical-point convergence tolerance

  void validate(bool allow_zero_q = false) const;
};

// Nonlinearity catalog: g = 0 (linear problem) or the power family
// g(t) = |t|^{p-2} t with p in (2,6). The growth metadata (a1, a2, b1, b2,
// s, r) is carried so the verification suite can sample the conditions.
struct Nonlinearity {
  enum class Kind { none, power };

  Kind kind = Kind::none;
  double p = 0.0;
  double s = 0.0;
  double r = 0.0;
  bool odd = true;
  double a1 = 0.0, a2 = 0.0;  // |g| <= a1 + a2 |t|^{p-1}
  double b1 = 0.0, b2 = 0.0;  // G >= b1 |t|^s - b2

  static Nonlinearity none();
  static Nonlinearity power(double p);
};

double eval_g(const Nonlinearity& nl, double t);
double eval_G(const Nonlinearity& nl, double t);

// The potential solves and their split, reused across functional and
// gradient evaluations. xi/eta double as warm starts for the next solve.
struct ReducedState {
  ScalarField xi, eta, phi;  // phi = xi + eta
  bool valid = false;
};

// phi_u and its split for u; uses and refreshes `cache` when given.
ReducedState compute_reduced_state(const ScalarField& u, const LiftingPotential& lift,
                                   const Params& params, ReducedState* cache = nullptr);

// F(u, phi) = 1/2 ||grad u||^2 + 1/2 int [m^2 - q^2 (phi+chi)^2] u^2
//             - 1/2 ||grad phi||^2 + kappa |Omega| avg(phi),
// with both gradient terms evaluated as grad_energy (the operator form).
double full_F(const ScalarField& u, const ScalarField& phi, const LiftingPotential& lift,
              const Params& params);

// F_g = F - int G(u).
double full_F_g(const ScalarField& u, const ScalarField& phi, const LiftingPotential& lift,
                const Params& params, const Nonlinearity& nl);

// Reduced functional of the linear problem,
// J(u) = 1/2||grad u||^2 + 1/2 int (m^2 - q^2 chi^2) u^2
//        - q^2/2 int xi chi u^2 + kappa|Omega| avg(xi) + kappa|Omega|/2 avg(eta).
// Requires u != 0; equals full_F(u, phi_u) up to the inner solve tolerance.
double J(const ScalarField& u, const LiftingPotential& lift, const Params& params,
         ReducedState* cache = nullptr);

// Weak residual r of J at u: <r, v> under the volume quadrature equals
// J'(u)[v] for every Dirichlet-conforming v; r vanishes on the boundary.
ScalarField grad_J(const ScalarField& u, const LiftingPotential& lift,
                   const Params& params, ReducedState* cache = nullptr);

// Reduced functional of the perturbed problem. A nonlinearity other than
// `none` requires a mean-zero boundary datum (kappa = 0); J_g(0) = 0.
double J_g(const ScalarField& u, const LiftingPotential& lift, const Params& params,
           const Nonlinearity& nl, ReducedState* cache = nullptr);

ScalarField grad_J_g(const ScalarField& u, const LiftingPotential& lift,
                     const Params& params, const Nonlinearity& nl,
                     ReducedState* cache = nullptr);

// Samples n random perturbations psi and checks
// full_F(u, phi_u) >= full_F(u, phi_u + psi) - 1e-10 * scale:
// phi_u is the unique maximizer of the concave map phi -> F(u, phi).
bool maximizer_check(const ScalarField& u, const ScalarField& phi_u,
                     const LiftingPotential& lift, const Params& params,
                     int n_samples, std::uint64_t seed = 0);

}  // namespace kgm
