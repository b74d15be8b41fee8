#include <doctest.h>

#include <cmath>

#include "kgm/critical.hpp"
#include "kgm/errors.hpp"
#include "kgm/rng.hpp"
#include "oracles.hpp"

using namespace kgm;

namespace {

constexpr double kPi = 3.14159265358979323846;

BoundaryData dipole(const GridPtr& grid, double amplitude) {
  BoundaryData h(grid, 0.0);
  for (std::size_t b = 0; b < h.size(); ++b) {
    const auto c = grid->coords(grid->boundary_nodes()[b]);
    if (c[0] == 0)
      h[b] = -amplitude;
    else if (c[0] == grid->counts()[0] - 1)
      h[b] = amplitude;
  }
  return h;
}

Params tight_params(double m = 1.0, double q = 0.1) {
  Params p;
  p.m = m;
  p.q = q;
  p.tol = 1e-11;
  return p;
}

}  // namespace

TEST_CASE("lambda1 matches separation of variables on cubes and boxes") {
  const auto cube = Grid::make({1, 1, 1}, {17, 17, 17});
  const double lam_cube = lambda1(cube, 1e-9);
  CHECK(std::abs(lam_cube - 3.0 * kPi * kPi) <= 0.01 * 3.0 * kPi * kPi);

  const auto box = Grid::make({1, 1, 2}, {17, 17, 17});
  const double lam_box = lambda1(box, 1e-9);
  CHECK(std::abs(lam_box - 2.25 * kPi * kPi) <= 0.01 * 2.25 * kPi * kPi);
}

TEST_CASE("lambda_k returns an ordered ladder with orthonormal modes") {
  const auto grid = Grid::make({1.0, 0.9, 0.8}, {11, 11, 11});
  const EigenModes modes = dirichlet_modes(grid, 4, 1e-9);
  REQUIRE(modes.values.size() == 4);
  CHECK(modes.values[0] <= modes.values[1]);
  CHECK(modes.values[1] <= modes.values[2]);
  CHECK(modes.values[2] <= modes.values[3]);

  // exact stencil dispersion: sum_axis (4/h^2) sin^2(a pi h / (2 L))
  auto discrete = [&](int a, int b, int c) {
    const std::array<int, 3> t = {a, b, c};
    double s = 0.0;
    for (int ax = 0; ax < 3; ++ax) {
      const double h = grid->spacing()[ax];
      const double L = grid->lengths()[ax];
      const double sn = std::sin(0.5 * t[ax] * kPi * h / L);
      s += 4.0 / (h * h) * sn * sn;
    }
    return s;
  };
  CHECK(modes.values[0] == doctest::Approx(discrete(1, 1, 1)).epsilon(1e-8));
  CHECK(modes.values[1] == doctest::Approx(discrete(2, 1, 1)).epsilon(1e-8));
  CHECK(modes.values[2] == doctest::Approx(discrete(1, 2, 1)).epsilon(1e-8));

  for (std::size_t a = 0; a < modes.vectors.size(); ++a)
    for (std::size_t b = 0; b <= a; ++b) {
      const double dot = inner(modes.vectors[a], modes.vectors[b]);
      CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) <= 1e-8);
    }

  // eigen residual of the first pair
  const ScalarField au = apply_dirichlet_laplacian(modes.vectors[0]);
  double res = 0.0;
  for (std::size_t n = 0; n < au.size(); ++n) {
    const double e = au[n] - modes.values[0] * modes.vectors[0][n];
    res += grid->volume_weight(n) * e * e;
  }
  CHECK(std::sqrt(res) <= 1e-5 * modes.values[0]);
}

TEST_CASE("smallness_check: trivial datum, threshold cases, splitting index") {
  const auto grid = Grid::make({1, 1, 1}, {9, 9, 9});
  const std::vector<double> lambdas = lambda_k(grid, 2, 1e-9);

  const LiftingPotential lift0 = solve_chi(BoundaryData(grid, 0.0), 1e-12);
  const SmallnessReport r0 = smallness_check(lift0, tight_params(), lambdas);
  CHECK(r0.linf_small);
  CHECK(r0.spectral_small);
  CHECK(r0.k == 1);
  CHECK(r0.k_resolved);

  // q ||chi||_inf slightly above m: first check fails, second can hold
  const LiftingPotential lift = solve_chi(BoundaryData(grid, 1.0), 1e-12);
  Params p = tight_params();
  p.q = 1.02 * p.m / lift.chi_inf;
  const SmallnessReport r1 = smallness_check(lift, p, lambdas);
  CHECK_FALSE(r1.linf_small);
  CHECK(r1.spectral_small);

  // borderline: threshold placed between lambda_1 and lambda_2 -> k = 2
  Params p2 = tight_params();
  const double target = 0.5 * (lambdas[0] + lambdas[1]) + p2.m * p2.m;
  p2.q = std::sqrt(target) / lift.chi_inf;
  const SmallnessReport r2 = smallness_check(lift, p2, lambdas);
  CHECK(r2.threshold > lambdas[0]);
  CHECK(r2.threshold < lambdas[1]);
  CHECK(r2.k == 2);
  CHECK(r2.k_resolved);

  CHECK_THROWS_AS((void)smallness_check(lift, p2, {}), std::invalid_argument);
}

TEST_CASE("minimize_J finds a nontrivial minimizer when kappa is nonzero") {
  const auto grid = Grid::make({1, 1, 1}, {9, 9, 9});
  const Params params = tight_params();
  const LiftingPotential lift = solve_chi(BoundaryData(grid, 0.05), 1e-11);
  REQUIRE(lift.kappa != 0.0);

  const EigenModes modes = dirichlet_modes(grid, 1, 1e-9);
  const CriticalPoint cp = minimize_J(lift, params, modes.vectors[0], 1e-6, 2000);

  CHECK(cp.converged);
  CHECK(cp.nontrivial);
  CHECK(cp.grad_norm <= 1e-6);
  CHECK(cp.residual_matter <= 1e-5);
  CHECK(cp.residual_potential <= 1e-6);
  CHECK(all_passed(cp.certificates));

  // J is non-increasing along accepted steps
  for (std::size_t i = 1; i < cp.history.size(); ++i)
    CHECK(cp.history[i].value <= cp.history[i - 1].value + 1e-10);

  // the necessary condition certificate holds at the solution
  ScalarField phi_phys = cp.phi;
  phi_phys += lift.chi;
  const BoundaryData h(grid, 0.05);
  CHECK(check_necessary(cp.u, phi_phys, h, params).passed);

  // flipping the seed lands on the mirror solution with the same value
  ScalarField minus = modes.vectors[0];
  minus *= -1.0;
  const CriticalPoint cm = minimize_J(lift, params, minus, 1e-6, 2000);
  CHECK(cm.value == doctest::Approx(cp.value).epsilon(1e-7));
  double flip_dist = 0.0;
  for (std::size_t n = 0; n < cp.u.size(); ++n)
    flip_dist = std::max(flip_dist, std::abs(cp.u[n] + cm.u[n]));
  CHECK(flip_dist <= 1e-4 * norm(cp.u, NormKind::Linf));
}

TEST_CASE("minimize_J collapses to the trivial point when kappa = 0") {
  const auto grid = Grid::make({1, 1, 1}, {9, 9, 9});
  const Params params = tight_params();
  const LiftingPotential lift = solve_chi(BoundaryData(grid, 0.0), 1e-11);
  const EigenModes modes = dirichlet_modes(grid, 1, 1e-9);
  ScalarField u0 = modes.vectors[0];
  u0 *= 0.1;

  const CriticalPoint cp = minimize_J(lift, params, u0, 1e-6, 2000);
  CHECK_FALSE(cp.nontrivial);
  CHECK(cp.converged);
  CHECK(norm(cp.u, NormKind::L2) < trivial_threshold(*grid, params));
}

TEST_CASE("find_endpoint: doubling reaches a negative level; guards hold") {
  const auto grid = Grid::make({1, 1, 1}, {7, 7, 7});
  const Params params = tight_params();
  const LiftingPotential lift = solve_chi(dipole(grid, 0.05), 1e-11);
  const Nonlinearity p4 = Nonlinearity::power(4.0);
  const EigenModes modes = dirichlet_modes(grid, 1, 1e-9);

  const ScalarField e = find_endpoint(modes.vectors[0], p4, lift, params);
  CHECK(J_g(e, lift, params, p4) < 0.0);

  CHECK_THROWS_AS(
      (void)find_endpoint(modes.vectors[0], Nonlinearity::none(), lift, params),
      std::invalid_argument);
  CHECK_THROWS_AS((void)find_endpoint(ScalarField(grid, 0.0), p4, lift, params),
                  std::invalid_argument);
}

TEST_CASE("mountain_pass finds a positive-level critical point") {
  const auto grid = Grid::make({1, 1, 1}, {9, 9, 9});
  const Params params = tight_params();
  const LiftingPotential lift = solve_chi(dipole(grid, 0.05), 1e-11);
  const Nonlinearity p4 = Nonlinearity::power(4.0);

  const CriticalPoint cp = mountain_pass(p4, lift, params, 15, 1e-6, 4000);
  CHECK(cp.converged);
  CHECK(cp.nontrivial);
  CHECK(cp.value > 0.0);
  CHECK(cp.grad_norm <= 1e-6);
  CHECK(cp.residual_matter <= 1e-5);
  CHECK(cp.residual_potential <= 1e-6);
  CHECK(all_passed(cp.certificates));
  CHECK(std::isfinite(cp.barrier_alpha));
  CHECK(cp.value >= cp.barrier_alpha - 1e-10);

  // evenness at the solution
  ScalarField mu = cp.u;
  mu *= -1.0;
  CHECK(J_g(mu, lift, params, p4) == J_g(cp.u, lift, params, p4));

  // guards
  const LiftingPotential liftc = solve_chi(BoundaryData(grid, 0.05), 1e-11);
  CHECK_THROWS_AS((void)mountain_pass(p4, liftc, params, 15, 1e-6, 100),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      (void)mountain_pass(Nonlinearity::none(), lift, params, 15, 1e-6, 100),
      std::invalid_argument);
}

TEST_CASE("q = 0 reduces J_g to the plain scalar functional") {
  const auto grid = Grid::make({1, 1, 1}, {7, 7, 7});
  Params params = tight_params(1.3, 0.0);
  const LiftingPotential lift = solve_chi(dipole(grid, 0.05), 1e-11);
  const Nonlinearity p4 = Nonlinearity::power(4.0);
  Rng rng(97);
  for (int rep = 0; rep < 3; ++rep) {
    const ScalarField u = oracle::random_conforming(grid, rng);
    double mass = 0.0, quart = 0.0;
    for (std::size_t n = 0; n < u.size(); ++n) {
      const double w = grid->volume_weight(n);
      mass += w * u[n] * u[n];
      quart += w * u[n] * u[n] * u[n] * u[n];
    }
    const double expected =
        0.5 * grad_energy(u) + 0.5 * params.m * params.m * mass - 0.25 * quart;
    CHECK(J_g(u, lift, params, p4) == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("mountain_pass at q = 0 matches the Nehari-ray oracle") {
  const auto grid = Grid::make({1, 1, 1}, {9, 9, 9});
  Params params = tight_params(1.0, 0.0);
  const LiftingPotential lift = solve_chi(BoundaryData(grid, 0.0), 1e-11);
  const Nonlinearity p4 = Nonlinearity::power(4.0);

  const CriticalPoint cp = mountain_pass(p4, lift, params, 15, 1e-6, 4000);
  CHECK(cp.converged);
  CHECK(cp.value > 0.0);

  const EigenModes modes = dirichlet_modes(grid, 1, 1e-9);
  const auto oracle_result =
      oracle::nehari_ground_state(grid, params.m, 4.0, modes.vectors[0], 1e-8, 2000);
  CHECK(std::abs(cp.value - oracle_result.value) <= 0.02 * oracle_result.value);
}

TEST_CASE("multi_solutions returns distinct points with increasing levels") {
  const auto grid = Grid::make({1.0, 0.9, 0.8}, {9, 9, 9});
  const Params params = tight_params();
  const LiftingPotential lift = solve_chi(dipole(grid, 0.05), 1e-11);
  const Nonlinearity p4 = Nonlinearity::power(4.0);

  MultiOptions opts;
  opts.n_path = 13;
  opts.max_iter = 6000;
  const MultiResult res = multi_solutions(p4, lift, params, 3, 1e-6, opts);

  REQUIRE(res.complete);
  REQUIRE(res.solutions.size() >= 3);
  for (std::size_t i = 0; i < res.solutions.size(); ++i) {
    const CriticalPoint& cp = res.solutions[i];
    CHECK(cp.converged);
    CHECK(cp.nontrivial);
    CHECK(cp.grad_norm <= 1e-6);
    CHECK(all_passed(cp.certificates));
  }
  for (std::size_t i = 1; i < res.solutions.size(); ++i) {
    CHECK(norm(res.solutions[i].u, NormKind::gradL2) >
          norm(res.solutions[i - 1].u, NormKind::gradL2));
    CHECK(res.solutions[i].value > res.solutions[i - 1].value);
  }

  // sign-pair distinctness
  for (std::size_t i = 0; i < res.solutions.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      ScalarField dm = res.solutions[i].u, dp = res.solutions[i].u;
      dm -= res.solutions[j].u;
      dp += res.solutions[j].u;
      const double ref = std::sqrt(grad_energy(res.solutions[j].u));
      CHECK(std::min(std::sqrt(grad_energy(dm)), std::sqrt(grad_energy(dp))) >=
            0.05 * ref);
    }

  // uniform oscillation bound on the physical potentials
  for (const CriticalPoint& cp : res.solutions) {
    double osc = 0.0;
    for (std::size_t n = 0; n < cp.phi.size(); ++n)
      osc = std::max(osc, std::abs(cp.phi[n] + lift.chi[n]));
    CHECK(osc <= lift.chi_max - lift.chi_min +
                     10.0 * grid->max_spacing() * grid->max_spacing());
  }
}
