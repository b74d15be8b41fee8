#include "kgm/reduced.hpp"

#include <cmath>
#include <stdexcept>

#include "kgm/rng.hpp"

namespace kgm {

void Params::validate(bool allow_zero_q) const {
  if (!(m > 0.0)) throw std::invalid_argument("params: m must be positive");
  if (!allow_zero_q && q == 0.0)
    throw std::invalid_argument("params: q must be nonzero");
  if (!(tol > 0.0) || !(tol_grad > 0.0))
    throw std::invalid_argument("params: tolerances must be positive");
}

Nonlinearity Nonlinearity::none() { return Nonlinearity{}; }

Nonlinearity Nonlinearity::power(double p) {
  if (!(p > 2.0) || !(p < 6.0))
    throw std::invalid_argument("nonlinearity: p must lie in (2,6)");
  Nonlinearity nl;
  nl.kind = Kind::power;
  nl.p = p;
  nl.s = p;
  nl.r = 0.0;
  nl.odd = true;
  nl.a1 = 0.0;
  nl.a2 = 1.0;
  nl.b1 = 1.0 / p;
  nl.b2 = 0.0;
  return nl;
}

double eval_g(const Nonlinearity& nl, double t) {
  if (nl.kind == Nonlinearity::Kind::none || t == 0.0) return 0.0;
  return std::pow(std::abs(t), nl.p - 2.0) * t;
}

double eval_G(const Nonlinearity& nl, double t) {
  if (nl.kind == Nonlinearity::Kind::none || t == 0.0) return 0.0;
  return std::pow(std::abs(t), nl.p) / nl.p;
}

namespace {

double u_mass(const ScalarField& u) {
  const Grid& g = *u.grid();
  double s = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n) s += g.volume_weight(n) * u[n] * u[n];
  return s;
}

bool effectively_zero(const ScalarField& u) {
  return !(u_mass(u) > degenerate_screening_threshold(*u.grid()));
}

void require_admissible(const ScalarField& u, const char* who) {
  if (effectively_zero(u))
    throw std::invalid_argument(std::string(who) + ": u vanishes (not in Lambda)");
}

}  // namespace

ReducedState compute_reduced_state(const ScalarField& u, const LiftingPotential& lift,
                                   const Params& params, ReducedState* cache) {
  ReducedState st;
  if (params.q == 0.0) {
    // Decoupled limit: the potential equation drops out. Only consistent
    // with a compatible datum.
    if (lift.kappa != 0.0)
      throw std::invalid_argument(
          "compute_reduced_state: q = 0 with kappa != 0 admits no solution");
    st.xi = ScalarField(u.grid(), 0.0);
    st.eta = ScalarField(u.grid(), 0.0);
    st.phi = ScalarField(u.grid(), 0.0);
    st.valid = true;
    return st;
  }
  const ScalarField* xi0 = (cache && cache->valid) ? &cache->xi : nullptr;
  const ScalarField* eta0 = (cache && cache->valid) ? &cache->eta : nullptr;
  st.xi = compute_xi(u, lift, params.q, params.tol, nullptr, xi0);
  st.eta = compute_eta(u, lift.kappa, params.q, params.tol, nullptr, eta0);
  st.phi = st.xi;
  st.phi += st.eta;
  st.valid = true;
  if (cache) *cache = st;
  return st;
}

double full_F(const ScalarField& u, const ScalarField& phi, const LiftingPotential& lift,
              const Params& params) {
  const Grid& g = *u.grid();
  if (phi.grid()->node_count() != g.node_count())
    throw std::invalid_argument("full_F: grid mismatch");
  const double m2 = params.m * params.m;
  const double q2 = params.q * params.q;
  double bulk = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n) {
    const double pc = phi[n] + lift.chi[n];
    bulk += g.volume_weight(n) * (m2 - q2 * pc * pc) * u[n] * u[n];
  }
  return 0.5 * grad_energy(u) + 0.5 * bulk - 0.5 * grad_energy(phi) +
         lift.kappa * g.volume() * average(phi);
}

double full_F_g(const ScalarField& u, const ScalarField& phi, const LiftingPotential& lift,
                const Params& params, const Nonlinearity& nl) {
  const Grid& g = *u.grid();
  double gterm = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n)
    gterm += g.volume_weight(n) * eval_G(nl, u[n]);
  return full_F(u, phi, lift, params) - gterm;
}

namespace {

// The explicit reduced value (i): all potential terms expressed through the
// split phi_u = xi + eta, so the two singular-limit terms are separated.
double reduced_value(const ScalarField& u, const ReducedState& st,
                     const LiftingPotential& lift, const Params& params) {
  const Grid& g = *u.grid();
  const double m2 = params.m * params.m;
  const double q2 = params.q * params.q;
  double quad = 0.0, mix = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n) {
    const double w = g.volume_weight(n);
    const double u2 = u[n] * u[n];
    const double c = lift.chi[n];
    quad += w * (m2 - q2 * c * c) * u2;
    mix += w * st.xi[n] * c * u2;
  }
  const double kv = lift.kappa * g.volume();
  return 0.5 * grad_energy(u) + 0.5 * quad - 0.5 * q2 * mix + kv * average(st.xi) +
         0.5 * kv * average(st.eta);
}

ScalarField reduced_gradient(const ScalarField& u, const ReducedState& st,
                             const LiftingPotential& lift, const Params& params) {
  const Grid& g = *u.grid();
  const double m2 = params.m * params.m;
  const double q2 = params.q * params.q;
  ScalarField r = apply_dirichlet_laplacian(u);
  const auto& cts = g.counts();
  for (int k = 1; k < cts[2] - 1; ++k)
    for (int j = 1; j < cts[1] - 1; ++j)
      for (int i = 1; i < cts[0] - 1; ++i) {
        const std::size_t n = g.index(i, j, k);
        const double pc = st.phi[n] + lift.chi[n];
        r[n] += (m2 - q2 * pc * pc) * u[n];
      }
  return r;
}

}  // namespace

double J(const ScalarField& u, const LiftingPotential& lift, const Params& params,
         ReducedState* cache) {
  require_admissible(u, "J");
  const ReducedState st = compute_reduced_state(u, lift, params, cache);
  return reduced_value(u, st, lift, params);
}

ScalarField grad_J(const ScalarField& u, const LiftingPotential& lift,
                   const Params& params, ReducedState* cache) {
  require_admissible(u, "grad_J");
  const ReducedState st = compute_reduced_state(u, lift, params, cache);
  return reduced_gradient(u, st, lift, params);
}

namespace {

void require_Jg_config(const LiftingPotential& lift, const Nonlinearity& nl) {
  if (nl.kind != Nonlinearity::Kind::none && lift.kappa != 0.0)
    throw std::invalid_argument(
        "J_g: the nonlinear problem requires a mean-zero boundary datum "
        "(int h dsigma = 0)");
}

}  // namespace

double J_g(const ScalarField& u, const LiftingPotential& lift, const Params& params,
           const Nonlinearity& nl, ReducedState* cache) {
  require_Jg_config(lift, nl);
  if (nl.kind == Nonlinearity::Kind::none) return J(u, lift, params, cache);

  const Grid& g = *u.grid();
  double gterm = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n)
    gterm += g.volume_weight(n) * eval_G(nl, u[n]);

  if (effectively_zero(u)) {
    // Extension through 0: the coupling term is O(q^2 ||chi||_inf^2 |u|^2),
    // below solver noise at this scale.
    const double m2 = params.m * params.m;
    return 0.5 * grad_energy(u) + 0.5 * m2 * u_mass(u) - gterm;
  }

  const ReducedState st = compute_reduced_state(u, lift, params, cache);
  return reduced_value(u, st, lift, params) - gterm;
}

ScalarField grad_J_g(const ScalarField& u, const LiftingPotential& lift,
                     const Params& params, const Nonlinearity& nl, ReducedState* cache) {
  require_Jg_config(lift, nl);
  if (nl.kind == Nonlinearity::Kind::none) return grad_J(u, lift, params, cache);

  const Grid& g = *u.grid();
  ScalarField r(u.grid());
  if (effectively_zero(u)) {
    r = apply_dirichlet_laplacian(u);
    const double m2 = params.m * params.m;
    const auto& cts = g.counts();
    for (int k = 1; k < cts[2] - 1; ++k)
      for (int j = 1; j < cts[1] - 1; ++j)
        for (int i = 1; i < cts[0] - 1; ++i) {
          const std::size_t n = g.index(i, j, k);
          r[n] += m2 * u[n] - eval_g(nl, u[n]);
        }
    return r;
  }

  const ReducedState st = compute_reduced_state(u, lift, params, cache);
  r = reduced_gradient(u, st, lift, params);
  const auto& cts = g.counts();
  for (int k = 1; k < cts[2] - 1; ++k)
    for (int j = 1; j < cts[1] - 1; ++j)
      for (int i = 1; i < cts[0] - 1; ++i) {
        const std::size_t n = g.index(i, j, k);
        r[n] -= eval_g(nl, u[n]);
      }
  return r;
}

bool maximizer_check(const ScalarField& u, const ScalarField& phi_u,
                     const LiftingPotential& lift, const Params& params,
                     int n_samples, std::uint64_t seed) {
  const double base = full_F(u, phi_u, lift, params);
  const double slack = 1e-10 * (1.0 + std::abs(base));
  Rng rng(seed);
  for (int s = 0; s < n_samples; ++s) {
    ScalarField psi(u.grid());
    for (std::size_t n = 0; n < psi.size(); ++n) psi[n] = rng.uniform(-1.0, 1.0);
    ScalarField trial = phi_u;
    trial += psi;
    if (full_F(u, trial, lift, params) > base + slack) return false;
  }
  return true;
}

}  // namespace kgm
