#pragma once

#include <string>
#include <utility>
#include <vector>

#include "kgm/reduced.hpp"

namespace kgm {

// One verified statement. `measured` is the signed slack: positive means the
// statement holds with margin, and a certificate passes iff
// measured >= -tolerance. Identities report -(absolute residual).
struct Certificate {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string context;
};

Certificate make_certificate(std::string name, double measured, double tolerance,
                             std::string context);

// ||u||_L2 below this counts as the trivial solution.
double trivial_threshold(const Grid& grid, const Params& params);

// Quadrature norms of the two strong-form equation residuals:
//   r1: -Lap u - q^2 (phi+chi)^2 u + m^2 u - g(x,u)   (Dirichlet rows)
//   r2:  Lap phi - q^2 (phi+chi) u^2 + kappa          (zero-flux closure)
std::pair<double, double> residual_system(const ScalarField& u, const ScalarField& phi,
                                          const LiftingPotential& lift,
                                          const Params& params, const Nonlinearity& nl);

// Necessary condition q^2 int phi_physical u^2 dx = int h dsigma,
// with phi_physical = phi_u + chi. Relative slack against 1 + |int h|.
Certificate check_necessary(const ScalarField& u, const ScalarField& phi_physical,
                            const BoundaryData& h, const Params& params);

// Left side of the small-data rigidity identity
// ||grad u||^2 + q^2 int u^2 phi^2 + int (m^2 - q^2 chi^2) u^2 + 2||grad phi||^2.
// Every summand is nonnegative under the smallness condition, so a true
// solution with kappa = 0 forces u = 0.
double nonexistence_identity_value(const ScalarField& u, const ScalarField& phi,
                                   const LiftingPotential& lift, const Params& params);

Certificate check_nonexistence_identity(const ScalarField& u, const ScalarField& phi,
                                        const LiftingPotential& lift,
                                        const Params& params);

// The lemma-level audit of the potential split: solves xi_u, eta_u and emits
// one certificate per estimate. Integral identities carry relative tolerance
// 1e-8; pointwise brackets carry a spacing^2-scaled tolerance.
std::vector<Certificate> check_lemma_suite(const ScalarField& u,
                                           const LiftingPotential& lift,
                                           const Params& params);

// Samples the growth conditions (g1)-(g3) and their consequences (G1), (G2)
// on the given t grid using the catalog constants.
std::vector<Certificate> check_growth_conditions(const Nonlinearity& nl,
                                                 const std::vector<double>& t_grid);

bool all_passed(const std::vector<Certificate>& certs);

}  // namespace kgm
