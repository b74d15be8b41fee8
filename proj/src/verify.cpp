#include "kgm/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kgm {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

Certificate make_certificate(std::string name, double measured, double tolerance,
                             std::string context) {
  Certificate c;
  c.name = std::move(name);
  c.measured = measured;
  c.tolerance = tolerance;
  c.passed = measured >= -tolerance;
  c.context = std::move(context);
  return c;
}

double trivial_threshold(const Grid& grid, const Params& params) {
  return 1e-6 * std::sqrt(grid.volume()) * params.m;
}

std::pair<double, double> residual_system(const ScalarField& u, const ScalarField& phi,
                                          const LiftingPotential& lift,
                                          const Params& params, const Nonlinearity& nl) {
  const Grid& g = *u.grid();
  const double m2 = params.m * params.m;
  const double q2 = params.q * params.q;

  // Matter equation: Dirichlet rows contribute the boundary values of u.
  ScalarField e1 = apply_dirichlet_laplacian(u);
  double r1sq = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n) {
    double e;
    if (g.is_boundary(n)) {
      e = u[n];
    } else {
      const double pc = phi[n] + lift.chi[n];
      e = e1[n] - q2 * pc * pc * u[n] + m2 * u[n] - eval_g(nl, u[n]);
    }
    r1sq += g.volume_weight(n) * e * e;
  }

  // Potential equation with the zero-flux closure baked into the operator.
  NeumannOperator lap(u.grid());
  ScalarField neumann = lap.apply(phi);  // = -Lap phi
  double r2sq = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n) {
    const double pc = phi[n] + lift.chi[n];
    const double e = -neumann[n] - q2 * pc * u[n] * u[n] + lift.kappa;
    r2sq += g.volume_weight(n) * e * e;
  }
  return {std::sqrt(r1sq), std::sqrt(r2sq)};
}

Certificate check_necessary(const ScalarField& u, const ScalarField& phi_physical,
                            const BoundaryData& h, const Params& params) {
  const Grid& g = *u.grid();
  const double q2 = params.q * params.q;
  double lhs = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n)
    lhs += g.volume_weight(n) * phi_physical[n] * u[n] * u[n];
  lhs *= q2;
  const double rhs = boundary_integral(h);
  const double measured = -std::abs(lhs - rhs) / (1.0 + std::abs(rhs));
  return make_certificate("necessary_condition", measured, 1e-6,
                          "q2*int(phi u^2)=" + fmt(lhs) + " int(h)=" + fmt(rhs));
}

double nonexistence_identity_value(const ScalarField& u, const ScalarField& phi,
                                   const LiftingPotential& lift, const Params& params) {
  const Grid& g = *u.grid();
  const double m2 = params.m * params.m;
  const double q2 = params.q * params.q;
  double bulk = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n) {
    const double w = g.volume_weight(n);
    const double u2 = u[n] * u[n];
    const double c = lift.chi[n];
    bulk += w * (q2 * u2 * phi[n] * phi[n] + (m2 - q2 * c * c) * u2);
  }
  return grad_energy(u) + bulk + 2.0 * grad_energy(phi);
}

Certificate check_nonexistence_identity(const ScalarField& u, const ScalarField& phi,
                                        const LiftingPotential& lift,
                                        const Params& params) {
  if (lift.kappa != 0.0)
    throw std::invalid_argument("check_nonexistence_identity: requires kappa = 0");
  const double value = nonexistence_identity_value(u, phi, lift, params);
  const double ul2 = norm(u, NormKind::L2);
  const double tol = 1e-8 * (1.0 + grad_energy(u) + grad_energy(phi));
  if (ul2 < trivial_threshold(*u.grid(), params)) {
    return make_certificate("nonexistence_identity", 0.0, tol,
                            "trivial u (||u||_2=" + fmt(ul2) + "), value=" + fmt(value));
  }
  return make_certificate("nonexistence_identity", -std::abs(value), tol,
                          "value=" + fmt(value) + " ||u||_2=" + fmt(ul2));
}

std::vector<Certificate> check_lemma_suite(const ScalarField& u,
                                           const LiftingPotential& lift,
                                           const Params& params) {
  const Grid& g = *u.grid();
  const double q2 = params.q * params.q;
  const double vol = g.volume();
  const double kappa = lift.kappa;
  const double h2 = g.max_spacing() * g.max_spacing();
  const double tol_pw = 10.0 * h2;

  ReducedState st = compute_reduced_state(u, lift, params);
  const ScalarField& xi = st.xi;
  const ScalarField& eta = st.eta;

  std::vector<Certificate> out;
  const std::string ctx = "m=" + fmt(params.m) + " q=" + fmt(params.q) +
                          " kappa=" + fmt(kappa) + " |chi|_inf=" + fmt(lift.chi_inf);

  // int xi chi u^2 <= 0
  double mix = 0.0, mix_abs = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n) {
    const double t = g.volume_weight(n) * xi[n] * lift.chi[n] * u[n] * u[n];
    mix += t;
    mix_abs += std::abs(t);
  }
  out.push_back(make_certificate("intmeno", -mix, 1e-8 * (1.0 + mix_abs), ctx));

  // -max chi <= xi <= -min chi, node by node
  double slack_lo = std::numeric_limits<double>::infinity();
  double slack_hi = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < u.size(); ++n) {
    slack_lo = std::min(slack_lo, xi[n] + lift.chi_max);
    slack_hi = std::min(slack_hi, -lift.chi_min - xi[n]);
  }
  out.push_back(make_certificate("m_lower", slack_lo, tol_pw, ctx));
  out.push_back(make_certificate("m_upper", slack_hi, tol_pw, ctx));

  // ||xi||_inf <= ||chi||_inf
  const double xi_inf = norm(xi, NormKind::Linf);
  out.push_back(make_certificate("stimaphi", lift.chi_inf - xi_inf,
                                 1e-8 * (1.0 + lift.chi_inf), ctx));

  // ||grad xi||_2 <= ||grad chi||_2 in the operator energy seminorm
  const double xi_grad = std::sqrt(grad_energy(xi));
  out.push_back(make_certificate("stima_gradfi", lift.chi_grad - xi_grad,
                                 1e-8 * (1.0 + lift.chi_grad), ctx));

  // ||eta||_2 >= |kappa| |Omega| / (q^2 ||u||_4^2)
  const double u4 = norm(u, NormKind::L4);
  const double eta_l2 = norm(eta, NormKind::L2);
  const double eta1_rhs =
      (q2 > 0.0 && u4 > 0.0) ? std::abs(kappa) * vol / (q2 * u4 * u4) : 0.0;
  out.push_back(
      make_certificate("eta1", eta_l2 - eta1_rhs, 1e-8 * (1.0 + eta1_rhs), ctx));

  // kappa * eta >= 0, node by node
  double eta2_slack = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n)
    eta2_slack = std::min(eta2_slack, kappa * eta[n]);
  out.push_back(make_certificate("eta2", eta2_slack, tol_pw, ctx));

  // Energy identity behind the eta gradient bound, plus the measured
  // Poincare-Wirtinger chain constant c1 (reported, never asserted).
  const double eta_bar = average(eta);
  double flux = 0.0, fluc = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n) {
    const double w = g.volume_weight(n);
    const double d = eta[n] - eta_bar;
    flux += w * d * u[n] * u[n];
    fluc += w * d * d * u[n] * u[n];
  }
  const double eta_energy = grad_energy(eta);
  const double spezz_residual = eta_energy + q2 * fluc + q2 * eta_bar * flux;
  const double spezz_scale = 1.0 + eta_energy + q2 * fluc + std::abs(q2 * eta_bar * flux);
  const double c1 = (std::abs(eta_bar) > 0.0 && u4 > 0.0)
                        ? std::sqrt(eta_energy) / (std::abs(eta_bar) * u4 * u4)
                        : 0.0;
  out.push_back(make_certificate("spezz", -std::abs(spezz_residual),
                                 1e-8 * spezz_scale, ctx + " c1=" + fmt(c1)));

  // q^2 int chi eta u^2 = -kappa |Omega| avg(xi)
  double mixed = 0.0, mixed_abs = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n) {
    const double t = g.volume_weight(n) * lift.chi[n] * eta[n] * u[n] * u[n];
    mixed += t;
    mixed_abs += std::abs(t);
  }
  const double misto_lhs = q2 * mixed;
  const double misto_rhs = -kappa * vol * average(xi);
  out.push_back(make_certificate(
      "misto", -std::abs(misto_lhs - misto_rhs),
      1e-8 * (1.0 + q2 * mixed_abs + std::abs(misto_rhs)), ctx));

  // phi_u = xi + eta solves the potential equation (superposition residual).
  {
    ScalarField screening(u.grid());
    for (std::size_t n = 0; n < u.size(); ++n) screening[n] = q2 * u[n] * u[n];
    NeumannOperator op(u.grid(), std::move(screening));
    ScalarField lhs = op.apply(st.phi);
    double res_sq = 0.0, rhs_sq = 0.0;
    for (std::size_t n = 0; n < u.size(); ++n) {
      const double rhs = kappa - q2 * lift.chi[n] * u[n] * u[n];
      const double e = lhs[n] - rhs;
      res_sq += g.volume_weight(n) * e * e;
      rhs_sq += g.volume_weight(n) * rhs * rhs;
    }
    out.push_back(make_certificate("aggiunta1", -std::sqrt(res_sq),
                                   1e-8 * (1.0 + std::sqrt(rhs_sq)), ctx));
  }

  // ||xi + chi||_inf <= max chi - min chi
  double osc_inf = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n)
    osc_inf = std::max(osc_inf, std::abs(xi[n] + lift.chi[n]));
  out.push_back(make_certificate(
      "unifbound", (lift.chi_max - lift.chi_min) - osc_inf, tol_pw, ctx));

  return out;
}

std::vector<Certificate> check_growth_conditions(const Nonlinearity& nl,
                                                 const std::vector<double>& t_grid) {
  std::vector<Certificate> out;
  const bool none = (nl.kind == Nonlinearity::Kind::none);
  const std::string ctx =
      none ? "kind=none"
           : "kind=power p=" + fmt(nl.p) + " s=" + fmt(nl.s) + " r=" + fmt(nl.r);

  // (g1): |g| <= a1 + a2 |t|^{p-1}
  double g1_slack = std::numeric_limits<double>::infinity();
  double g1_scale = 0.0;
  for (double t : t_grid) {
    const double bound =
        nl.a1 + (none ? 0.0 : nl.a2 * std::pow(std::abs(t), nl.p - 1.0));
    g1_slack = std::min(g1_slack, bound - std::abs(eval_g(nl, t)));
    g1_scale = std::max(g1_scale, bound);
  }
  out.push_back(make_certificate("g1", g1_slack, 1e-12 * (1.0 + g1_scale), ctx));

  // (g2): g(t)/|t| -> 0 monotonically along t = 10^{-k}
  {
    double prev = std::numeric_limits<double>::infinity();
    double worst = std::numeric_limits<double>::infinity();
    double last = 0.0;
    for (int k = 1; k <= 8; ++k) {
      const double t = std::pow(10.0, -k);
      const double v = std::abs(eval_g(nl, t)) / t;
      if (prev < std::numeric_limits<double>::infinity())
        worst = std::min(worst, prev - v);
      prev = v;
      last = v;
    }
    out.push_back(make_certificate("g2", worst, 1e-12,
                                   ctx + " ratio_at_1e-8=" + fmt(last)));
  }

  // (g3): 0 < s G <= t g for |t| >= r
  {
    double slack = std::numeric_limits<double>::infinity();
    double positivity = std::numeric_limits<double>::infinity();
    double scale = 0.0;
    const double floor = std::max(nl.r, 1e-9);
    bool sampled = false;
    for (double t : t_grid) {
      if (std::abs(t) < floor) continue;
      sampled = true;
      const double sG = nl.s * eval_G(nl, t);
      const double tg = t * eval_g(nl, t);
      slack = std::min(slack, tg - sG);
      positivity = std::min(positivity, sG);
      scale = std::max(scale, std::abs(tg));
    }
    if (none || !sampled) {
      out.push_back(make_certificate("g3", 0.0, 1e-12, ctx + " vacuous"));
    } else {
      const double tol = 1e-12 * (1.0 + scale);
      const double measured = std::min(slack, positivity - tol);
      out.push_back(make_certificate("g3", measured, tol, ctx));
    }
  }

  // (G1): |G| <= eps/2 t^2 + A |t|^p with eps = 0.1, A from the catalog
  {
    const double eps = 0.1;
    const double A = none ? 0.0 : 1.0 / nl.p;
    double slack = std::numeric_limits<double>::infinity();
    double scale = 0.0;
    for (double t : t_grid) {
      const double bound =
          0.5 * eps * t * t + (none ? 0.0 : A * std::pow(std::abs(t), nl.p));
      slack = std::min(slack, bound - std::abs(eval_G(nl, t)));
      scale = std::max(scale, bound);
    }
    out.push_back(
        make_certificate("G1", slack, 1e-12 * (1.0 + scale), ctx + " eps=0.1"));
  }

  // (G2): G >= b1 |t|^s - b2
  {
    double slack = std::numeric_limits<double>::infinity();
    double scale = 0.0;
    for (double t : t_grid) {
      const double bound = nl.b1 * std::pow(std::abs(t), nl.s) - nl.b2;
      slack = std::min(slack, eval_G(nl, t) - bound);
      scale = std::max(scale, std::abs(bound));
    }
    if (t_grid.empty()) slack = 0.0;
    out.push_back(make_certificate("G2", slack, 1e-12 * (1.0 + scale), ctx));
  }

  return out;
}

bool all_passed(const std::vector<Certificate>& certs) {
  return std::all_of(certs.begin(), certs.end(),
                     [](const Certificate& c) { return c.passed; });
}

}  // namespace kgm
