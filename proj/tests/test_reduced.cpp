#include <doctest.h>

#include <cmath>

#include "kgm/reduced.hpp"
#include "kgm/rng.hpp"
#include "oracles.hpp"

using namespace kgm;

namespace {

constexpr double kPi = 3.14159265358979323846;

Params tight_params(double m = 1.0, double q = 0.1) {
  Params p;
  p.m = m;
  p.q = q;
  p.tol = 1e-12;
  return p;
}

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

ScalarField sine_mode(const GridPtr& grid, int a, int b, int c) {
  const auto& cts = grid->counts();
  ScalarField f(grid);
  for (int k = 0; k < cts[2]; ++k)
    for (int j = 0; j < cts[1]; ++j)
      for (int i = 0; i < cts[0]; ++i)
        f[grid->index(i, j, k)] = std::sin(a * kPi * i / (cts[0] - 1)) *
                                  std::sin(b * kPi * j / (cts[1] - 1)) *
                                  std::sin(c * kPi * k / (cts[2] - 1));
  f.zero_boundary();
  return f;
}

}  // namespace

TEST_CASE("nonlinearity catalog: values, antiderivative, construction guards") {
  const Nonlinearity p4 = Nonlinearity::power(4.0);
  CHECK(eval_g(p4, 2.0) == doctest::Approx(8.0));
  CHECK(eval_G(p4, 2.0) == doctest::Approx(4.0));
  CHECK(eval_g(p4, 0.0) == 0.0);
  CHECK(eval_G(p4, 0.0) == 0.0);

  const Nonlinearity p3 = Nonlinearity::power(3.0);
  CHECK(eval_g(p3, -2.0) == doctest::Approx(-4.0));
  CHECK(eval_G(p3, -2.0) == doctest::Approx(8.0 / 3.0));

  const Nonlinearity none = Nonlinearity::none();
  CHECK(eval_g(none, 3.0) == 0.0);
  CHECK(eval_G(none, 3.0) == 0.0);

  CHECK_THROWS_AS((void)Nonlinearity::power(2.0), std::invalid_argument);
  CHECK_THROWS_AS((void)Nonlinearity::power(6.0), std::invalid_argument);
  CHECK_THROWS_AS((void)Nonlinearity::power(7.5), std::invalid_argument);

  // s G(t) <= t g(t) for the power family (s = p)
  for (double t : {-3.0, -0.5, 0.7, 2.5})
    CHECK(p4.s * eval_G(p4, t) <= t * eval_g(p4, t) + 1e-12);
}

TEST_CASE("params validation") {
  Params p;
  p.m = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.m = 1.0;
  p.q = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  CHECK_NOTHROW(p.validate(true));  // decoupled runs may pass q = 0 explicitly
  p.q = 0.5;
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("full_F: zero cases and term-by-term oracle") {
  const auto grid = Grid::make({1, 1, 1}, {5, 5, 5});
  const Params params = tight_params();

  const LiftingPotential lift0 = solve_chi(BoundaryData(grid, 0.0), 1e-12);
  CHECK(full_F(ScalarField(grid, 0.0), ScalarField(grid, 0.0), lift0, params) == 0.0);
  // kappa = 0: constants only enter through the source term
  CHECK(full_F(ScalarField(grid, 0.0), ScalarField(grid, 2.0), lift0, params) == 0.0);

  const LiftingPotential lift = solve_chi(BoundaryData(grid, 0.06), 1e-12);
  Rng rng(3);
  for (int rep = 0; rep < 5; ++rep) {
    const ScalarField u = oracle::random_conforming(grid, rng);
    const ScalarField phi = oracle::random_field(grid, rng);
    const auto terms = oracle::full_f_terms(u, phi, lift, params);
    const double value = full_F(u, phi, lift, params);
    CHECK(value == doctest::Approx(terms.total()).epsilon(1e-12));
    CHECK(grad_energy(u) == doctest::Approx(terms.grad_u).epsilon(1e-12));
    CHECK(grad_energy(phi) == doctest::Approx(terms.grad_phi).epsilon(1e-12));
  }
}

TEST_CASE("J: uncoupled closed form when h = 0") {
  const auto grid = Grid::make({1, 1, 1}, {7, 7, 7});
  const Params params = tight_params(1.3, 0.2);
  const LiftingPotential lift = solve_chi(BoundaryData(grid, 0.0), 1e-12);
  Rng rng(5);
  for (int rep = 0; rep < 3; ++rep) {
    const ScalarField u = oracle::random_conforming(grid, rng);
    const double ul2 = norm(u, NormKind::L2);
    const double expected =
        0.5 * grad_energy(u) + 0.5 * params.m * params.m * ul2 * ul2;
    CHECK(J(u, lift, params) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("J equals full_F at the reduced potential") {
  Rng rng(7);
  for (const auto& counts : {std::array<int, 3>{5, 5, 5}, std::array<int, 3>{7, 6, 5}}) {
    const auto grid = Grid::make({1.0, 1.1, 0.9}, counts);
    const Params params = tight_params(1.0, 0.3);
    const LiftingPotential lift = solve_chi(BoundaryData(grid, 0.05), 1e-13);
    for (int rep = 0; rep < 5; ++rep) {
      const ScalarField u = oracle::random_conforming(grid, rng);
      ReducedState st;
      const double j = J(u, lift, params, &st);
      const double f = full_F(u, st.phi, lift, params);
      CHECK(std::abs(j - f) <= 1e-8 * (1.0 + std::abs(j)));
    }
  }
}

TEST_CASE("J rejects the zero field") {
  const auto grid = Grid::make({1, 1, 1}, {5, 5, 5});
  const LiftingPotential lift = solve_chi(BoundaryData(grid, 0.05), 1e-12);
  CHECK_THROWS_AS((void)J(ScalarField(grid, 0.0), lift, tight_params()),
                  std::invalid_argument);
}

TEST_CASE("J blows up along shrinking rays when kappa is nonzero") {
  const auto grid = Grid::make({1, 1, 1}, {9, 9, 9});
  const Params params = tight_params();
  const LiftingPotential lift = solve_chi(BoundaryData(grid, 0.05), 1e-12);
  REQUIRE(lift.kappa != 0.0);
  const ScalarField u0 = sine_mode(grid, 1, 1, 1);

  std::vector<double> values;
  for (int j = 0; j <= 8; ++j) {
    ScalarField u = u0;
    u *= std::pow(0.5, j);
    values.push_back(J(u, lift, params));
  }
  // eventually increasing as t decreases: the last few steps must climb
  for (std::size_t j = values.size() - 4; j + 1 < values.size(); ++j)
    CHECK(values[j + 1] > values[j]);
  CHECK(values.back() > values.front());
}

TEST_CASE("grad_J matches central differences of J (envelope property)") {
  Rng rng(11);
  const auto grid = Grid::make({1, 1, 1}, {7, 7, 7});
  const Params params = tight_params(1.0, 0.25);
  const LiftingPotential lift = solve_chi(BoundaryData(grid, 0.05), 1e-13);
  const double eps = 1e-5;

  for (int rep = 0; rep < 5; ++rep) {
    const ScalarField u = oracle::random_conforming(grid, rng);
    const ScalarField v = oracle::random_conforming(grid, rng);
    const ScalarField r = grad_J(u, lift, params);
    CHECK(r.dirichlet_conforming());
    const double pairing = inner(r, v);

    ScalarField up = u, um = u;
    for (std::size_t n = 0; n < u.size(); ++n) {
      up[n] += eps * v[n];
      um[n] -= eps * v[n];
    }
    const double fd = (J(up, lift, params) - J(um, lift, params)) / (2.0 * eps);
    CHECK(std::abs(pairing - fd) <= 1e-5 * (1.0 + std::abs(fd)));
  }

  // zero direction pairs to zero
  const ScalarField u = oracle::random_conforming(grid, rng);
  CHECK(inner(grad_J(u, lift, params), ScalarField(grid, 0.0)) == 0.0);
}

TEST_CASE("grad_J on the first eigenmode reproduces the linear pairing") {
  const auto grid = Grid::make({1, 1, 1}, {9, 9, 9});
  const Params params = tight_params(1.0, 0.2);
  const LiftingPotential lift = solve_chi(BoundaryData(grid, 0.0), 1e-12);

  const ScalarField psi = sine_mode(grid, 1, 1, 1);
  const double h = grid->spacing()[0];
  const double lam = 3.0 * (4.0 / (h * h)) * std::pow(std::sin(0.5 * kPi * h), 2);
  const double scale = 0.7;
  ScalarField u = psi;
  u *= scale;
  const double pairing = inner(grad_J(u, lift, params), psi);
  const double l2 = norm(psi, NormKind::L2);
  CHECK(pairing == doctest::Approx(scale * (lam + params.m * params.m) * l2 * l2)
                       .epsilon(1e-10));
}

TEST_CASE("J_g: extension by zero, fallback to J, and the config guard") {
  const auto grid = Grid::make({1, 1, 1}, {7, 7, 7});
  const Params params = tight_params(1.0, 0.15);
  const LiftingPotential liftd = solve_chi(dipole(grid, 0.05), 1e-12);
  REQUIRE(liftd.kappa == 0.0);
  const Nonlinearity p4 = Nonlinearity::power(4.0);

  CHECK(J_g(ScalarField(grid, 0.0), liftd, params, p4) == 0.0);
  CHECK(norm(grad_J_g(ScalarField(grid, 0.0), liftd, params, p4), NormKind::Linf) ==
        0.0);

  Rng rng(13);
  const ScalarField u = oracle::random_conforming(grid, rng);
  CHECK(J_g(u, liftd, params, Nonlinearity::none()) ==
        doctest::Approx(J(u, liftd, params)).epsilon(1e-14));

  const LiftingPotential liftc = solve_chi(BoundaryData(grid, 0.05), 1e-12);
  REQUIRE(liftc.kappa != 0.0);
  CHECK_THROWS_AS((void)J_g(u, liftc, params, p4), std::invalid_argument);
  // without a nonlinearity kappa != 0 stays admissible
  CHECK(J_g(u, liftc, params, Nonlinearity::none()) ==
        doctest::Approx(J(u, liftc, params)).epsilon(1e-14));
}

TEST_CASE("grad_J_g matches central differences of J_g") {
  Rng rng(17);
  const auto grid = Grid::make({1, 1, 1}, {7, 7, 7});
  const Params params = tight_params(1.0, 0.15);
  const LiftingPotential lift = solve_chi(dipole(grid, 0.05), 1e-13);
  const Nonlinearity p4 = Nonlinearity::power(4.0);
  const double eps = 1e-5;

  for (int rep = 0; rep < 5; ++rep) {
    const ScalarField u = oracle::random_conforming(grid, rng);
    const ScalarField v = oracle::random_conforming(grid, rng);
    const double pairing = inner(grad_J_g(u, lift, params, p4), v);
    ScalarField up = u, um = u;
    for (std::size_t n = 0; n < u.size(); ++n) {
      up[n] += eps * v[n];
      um[n] -= eps * v[n];
    }
    const double fd =
        (J_g(up, lift, params, p4) - J_g(um, lift, params, p4)) / (2.0 * eps);
    CHECK(std::abs(pairing - fd) <= 1e-5 * (1.0 + std::abs(fd)));
  }
}

TEST_CASE("evenness: J_g(-u) = J_g(u) exactly") {
  const auto grid = Grid::make({1, 1, 1}, {7, 7, 7});
  const Params params = tight_params(1.0, 0.2);
  const LiftingPotential lift = solve_chi(dipole(grid, 0.04), 1e-12);
  const Nonlinearity p4 = Nonlinearity::power(4.0);
  Rng rng(19);
  for (int rep = 0; rep < 3; ++rep) {
    const ScalarField u = oracle::random_conforming(grid, rng);
    ScalarField mu = u;
    mu *= -1.0;
    CHECK(J_g(u, lift, params, p4) == J_g(mu, lift, params, p4));
  }
}

TEST_CASE("coercivity witness and small-data sign condition") {
  const auto grid = Grid::make({1, 1, 1}, {9, 9, 9});
  const Params params = tight_params(1.0, 0.1);
  const LiftingPotential lift = solve_chi(BoundaryData(grid, 0.05), 1e-12);
  REQUIRE(std::abs(params.q) * lift.chi_inf <= params.m);  // small data

  Rng rng(23);
  for (int rep = 0; rep < 5; ++rep) {
    const ScalarField u = oracle::random_conforming(grid, rng);
    ReducedState st;
    const double j = J(u, lift, params, &st);
    const double witness =
        0.5 * grad_energy(u) + lift.kappa * grid->volume() * average(st.xi);
    CHECK(j >= witness - 1e-8 * (1.0 + std::abs(j)));
    CHECK(lift.kappa * grid->volume() * average(st.xi) >=
          -std::abs(lift.kappa) * grid->volume() * lift.chi_inf - 1e-10);

    // quadratic form with m^2 - q^2 chi^2 >= 0 pointwise
    double quad = 0.0;
    for (std::size_t n = 0; n < u.size(); ++n) {
      const double c = lift.chi[n];
      quad += grid->volume_weight(n) *
              (params.m * params.m - params.q * params.q * c * c) * u[n] * u[n];
    }
    CHECK(quad >= 0.0);
  }
}

TEST_CASE("finite-dimensional blow-down of J_g along a fixed ray") {
  const auto grid = Grid::make({1, 1, 1}, {7, 7, 7});
  const Params params = tight_params(1.0, 0.1);
  const LiftingPotential lift = solve_chi(dipole(grid, 0.05), 1e-12);
  const Nonlinearity p4 = Nonlinearity::power(4.0);
  const ScalarField e = sine_mode(grid, 1, 1, 1);

  double prev = J_g(e, lift, params, p4);
  bool crossed = prev < 0.0;
  int decreasing_after_cross = 0;
  double t = 1.0;
  for (int k = 0; k < 14; ++k) {
    t *= 2.0;
    ScalarField te = e;
    te *= t;
    const double val = J_g(te, lift, params, p4);
    if (crossed) {
      CHECK(val < prev);  // monotone beyond the crossing
      ++decreasing_after_cross;
    }
    if (val < 0.0) crossed = true;
    prev = val;
  }
  CHECK(crossed);
  CHECK(decreasing_after_cross >= 5);
  CHECK(prev < -1.0);
}

TEST_CASE("maximizer_check: phi_u maximizes F(u, .)") {
  const auto grid = Grid::make({1, 1, 1}, {5, 5, 5});
  const Params params = tight_params(1.0, 0.3);
  Rng rng(29);
  const ScalarField u = oracle::random_conforming(grid, rng);

  const LiftingPotential lift = solve_chi(BoundaryData(grid, 0.06), 1e-13);
  ReducedState st = compute_reduced_state(u, lift, params);
  CHECK(maximizer_check(u, st.phi, lift, params, 20, 12345));

  // constant shifts strictly decrease F when kappa = 0 and u is nontrivial
  const LiftingPotential liftd = solve_chi(dipole(grid, 0.05), 1e-13);
  ReducedState std_ = compute_reduced_state(u, liftd, params);
  const double base = full_F(u, std_.phi, liftd, params);
  for (double c : {0.5, -0.5, 2.0}) {
    ScalarField shifted = std_.phi;
    for (std::size_t n = 0; n < shifted.size(); ++n) shifted[n] += c;
    CHECK(full_F(u, shifted, liftd, params) < base);
  }

  // a candidate far from phi_u: F grows along the ascent direction back to
  // phi_u, and the sampled check detects the misfit
  ScalarField wrong = st.phi;
  for (std::size_t n = 0; n < wrong.size(); ++n) wrong[n] += 1e5;
  ScalarField toward = wrong;
  for (std::size_t n = 0; n < toward.size(); ++n)
    toward[n] += 1e-3 * (st.phi[n] - wrong[n]);
  CHECK(full_F(u, toward, lift, params) > full_F(u, wrong, lift, params));
  CHECK_FALSE(maximizer_check(u, wrong, lift, params, 20, 999));
}
