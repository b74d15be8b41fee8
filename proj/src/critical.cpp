#include "kgm/critical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kgm/errors.hpp"

namespace kgm {

namespace {

constexpr double kPi = 3.14159265358979323846;

double u_mass(const ScalarField& u) {
  const Grid& g = *u.grid();
  double s = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n) s += g.volume_weight(n) * u[n] * u[n];
  return s;
}

ScalarField sobolev_direction(const ScalarField& r, double tol) {
  PcgOptions opts;
  opts.tol = tol;
  return pcg_dirichlet(r, opts);
}

// Reflection of node indices across the box midplane of one axis.
ScalarField mirror(const ScalarField& f, int axis) {
  const Grid& g = *f.grid();
  const auto& c = g.counts();
  ScalarField out(f.grid());
  for (int k = 0; k < c[2]; ++k)
    for (int j = 0; j < c[1]; ++j)
      for (int i = 0; i < c[0]; ++i) {
        const int ii = axis == 0 ? c[0] - 1 - i : i;
        const int jj = axis == 1 ? c[1] - 1 - j : j;
        const int kk = axis == 2 ? c[2] - 1 - k : k;
        out[g.index(i, j, k)] = f[g.index(ii, jj, kk)];
      }
  return out;
}

// Projects onto a reflection parity class (+1 even, -1 odd, 0 free per
// axis). Used to pin a search started from an eigenmode to the mode's
// invariant subspace; validity requires chi to have a definite parity along
// the axis, which keeps the reduced functional invariant under the
// reflection.
struct Symmetrizer {
  std::array<int, 3> parity = {0, 0, 0};

  bool active() const { return parity[0] != 0 || parity[1] != 0 || parity[2] != 0; }

  void apply(ScalarField& u) const {
    for (int a = 0; a < 3; ++a) {
      if (parity[a] == 0) continue;
      ScalarField m = mirror(u, a);
      for (std::size_t n = 0; n < u.size(); ++n)
        u[n] = 0.5 * (u[n] + parity[a] * m[n]);
    }
  }
};

std::array<int, 3> chi_parity(const ScalarField& chi) {
  std::array<int, 3> parity = {0, 0, 0};
  double scale = norm(chi, NormKind::Linf);
  if (scale == 0.0) scale = 1.0;
  for (int a = 0; a < 3; ++a) {
    ScalarField m = mirror(chi, a);
    double even = 0.0, odd = 0.0;
    for (std::size_t n = 0; n < chi.size(); ++n) {
      even = std::max(even, std::abs(m[n] - chi[n]));
      odd = std::max(odd, std::abs(m[n] + chi[n]));
    }
    if (even <= 1e-8 * scale)
      parity[a] = 1;
    else if (odd <= 1e-8 * scale)
      parity[a] = -1;
  }
  return parity;
}

// Objective wrapper: J for the linear problem, J_g when a nonlinearity is
// present.
struct Objective {
  const LiftingPotential& lift;
  const Params& params;
  const Nonlinearity* nl;  // nullptr -> linear J

  double value(const ScalarField& u, ReducedState* cache) const {
    return nl ? J_g(u, lift, params, *nl, cache) : J(u, lift, params, cache);
  }
  ScalarField gradient(const ScalarField& u, ReducedState* cache) const {
    return nl ? grad_J_g(u, lift, params, *nl, cache) : grad_J(u, lift, params, cache);
  }
};

struct ArmijoResult {
  bool accepted = false;
  double alpha = 0.0;
  double value = 0.0;
  ScalarField u;
  ReducedState state;
};

// Backtracking line search along -d with slope factor 1e-4, starting from
// alpha0 (callers warm-start it from the previously accepted step so an
// unstable full step cannot recycle forever). The acceptance floor sits just
// above quadrature rounding; anything larger lets noise-level increases
// feed a limit cycle near the minimizer.
ArmijoResult armijo_step(const Objective& obj, const ScalarField& u, double value,
                         const ScalarField& d, double slope,
                         const ReducedState& warm, const Symmetrizer* sym,
                         double alpha0 = 1.0) {
  ArmijoResult res;
  const double floor_noise = 1e-13 * (1.0 + std::abs(value));
  double alpha = alpha0;
  while (alpha >= 1e-14) {
    ScalarField trial = u;
    for (std::size_t n = 0; n < trial.size(); ++n) trial[n] -= alpha * d[n];
    trial.zero_boundary();
    if (sym && sym->active()) sym->apply(trial);
    ReducedState st = warm;
    const double val = obj.value(trial, &st);
    if (val <= value - 1e-4 * alpha * slope + floor_noise) {
      res.accepted = true;
      res.alpha = alpha;
      res.value = val;
      res.u = std::move(trial);
      res.state = std::move(st);
      return res;
    }
    alpha *= 0.5;
  }
  return res;
}

double deflation_factor(const ScalarField& u, const std::vector<ScalarField>& known,
                        double beta) {
  double m = 1.0;
  for (const ScalarField& k : known) {
    ScalarField dm = u, dp = u;
    dm -= k;
    dp += k;
    const double d2m = grad_energy(dm);
    const double d2p = grad_energy(dp);
    m *= 1.0 + beta / std::max(d2m * d2p, 1e-30);
  }
  return m;
}

CriticalPoint build_point(ScalarField u, ReducedState st, double value, double gdual,
                          const LiftingPotential& lift, const Params& params,
                          const Nonlinearity& nl, long iterations,
                          std::vector<HistoryRow> history) {
  CriticalPoint cp;
  cp.u = std::move(u);
  cp.phi = st.valid ? st.phi : ScalarField(cp.u.grid(), 0.0);
  cp.xi = st.valid ? st.xi : ScalarField(cp.u.grid(), 0.0);
  cp.eta = st.valid ? st.eta : ScalarField(cp.u.grid(), 0.0);
  cp.value = value;
  cp.grad_norm = gdual;
  auto [r1, r2] = residual_system(cp.u, cp.phi, lift, params, nl);
  cp.residual_matter = r1;
  cp.residual_potential = r2;
  cp.nontrivial = norm(cp.u, NormKind::L2) >= trivial_threshold(*cp.u.grid(), params);
  cp.converged = true;
  cp.iterations = iterations;
  cp.history = std::move(history);
  if (cp.nontrivial) cp.certificates = check_lemma_suite(cp.u, lift, params);
  return cp;
}

}  // namespace

CriticalPoint minimize_J(const LiftingPotential& lift, const Params& params,
                         const ScalarField& u0, double tol_grad, long max_iter) {
  params.validate(true);
  const GridPtr grid = u0.grid();
  if (lift.kappa != 0.0 && !(u_mass(u0) > degenerate_screening_threshold(*grid)))
    throw std::invalid_argument("minimize_J: u0 must be nonzero");

  Objective obj{lift, params, nullptr};
  ScalarField u = u0;
  u.zero_boundary();
  ReducedState cache;
  std::vector<HistoryRow> history;
  double last_alpha = 0.0;
  double alpha_start = 1.0;

  for (long it = 0; it <= max_iter; ++it) {
    if (norm(u, NormKind::L2) < trivial_threshold(*grid, params)) {
      // Descent reached the trivial basin; with a compatible datum this is
      // the expected outcome, with kappa != 0 it cannot be a solution.
      CriticalPoint cp;
      cp.u = ScalarField(grid, 0.0);
      cp.phi = ScalarField(grid, 0.0);
      cp.xi = ScalarField(grid, 0.0);
      cp.eta = ScalarField(grid, 0.0);
      cp.value = 0.0;
      cp.grad_norm = 0.0;
      auto [r1, r2] = residual_system(cp.u, cp.phi, lift, params, Nonlinearity::none());
      cp.residual_matter = r1;
      cp.residual_potential = r2;
      cp.nontrivial = false;
      cp.converged = (lift.kappa == 0.0);
      cp.iterations = it;
      cp.history = std::move(history);
      return cp;
    }

    const double value = obj.value(u, &cache);
    ScalarField r = obj.gradient(u, &cache);
    ScalarField d = sobolev_direction(r, params.tol);
    const double slope = inner(r, d);
    const double gdual = std::sqrt(std::max(slope, 0.0));
    const double strong = std::sqrt(inner(r, r));
    history.push_back({it, value, gdual, last_alpha});

    if (gdual <= tol_grad && strong <= 10.0 * tol_grad)
      return build_point(std::move(u), cache, value, gdual, lift, params,
                         Nonlinearity::none(), it, std::move(history));

    ArmijoResult step = armijo_step(obj, u, value, d, slope, cache, nullptr, alpha_start);
    if (!step.accepted)
      throw SolverError("minimize_J: line search failed (step below 1e-14)", gdual, it);
    u = std::move(step.u);
    cache = std::move(step.state);
    last_alpha = step.alpha;
    alpha_start = std::min(1.0, 2.0 * step.alpha);
  }
  throw SolverError("minimize_J: max_iter exceeded", 0.0, max_iter);
}

ScalarField find_endpoint(const ScalarField& direction, const Nonlinearity& nl,
                          const LiftingPotential& lift, const Params& params) {
  if (nl.kind != Nonlinearity::Kind::power)
    throw std::invalid_argument(
        "find_endpoint: needs a power nonlinearity (no endpoint exists for the "
        "coercive linear problem)");
  if (!(u_mass(direction) > degenerate_screening_threshold(*direction.grid())))
    throw std::invalid_argument("find_endpoint: direction vanishes");

  ReducedState cache;
  double t = 1.0;
  for (int k = 0; k <= 60; ++k) {
    ScalarField candidate = direction;
    candidate *= t;
    const double val = J_g(candidate, lift, params, nl, &cache);
    if (val < 0.0) return candidate;
    t *= 2.0;
  }
  throw SolverError(
      "find_endpoint: J_g stayed nonnegative up to t = 2^60 (mis-specified "
      "nonlinearity?)",
      0.0, 60);
}

namespace {

struct MpConfig {
  int n_path = 21;
  double tol_grad = 1e-6;
  long max_iter = 4000;
  const std::vector<ScalarField>* deflate = nullptr;
  double beta = 1.0;
  const Symmetrizer* sym = nullptr;
};

// Slope of t -> J_g(t w) for a fixed direction w; the envelope property makes
// it the plain pairing of the reduced gradient with w.
double ray_slope(const Objective& obj, const ScalarField& w, double t,
                 ReducedState* cache) {
  ScalarField tw = w;
  tw *= t;
  return inner(obj.gradient(tw, cache), w);
}

// Peak of t -> J_g(t w): bracket the sign change of the slope, then bisect
// with secant acceleration. Exists for every nonzero direction under the
// smallness condition (positive quadratic part, dominant negative power term).
// rel_tol controls the bracket width; every slope evaluation costs one
// screened solve, so callers loosen it while far from convergence.
double ray_peak(const Objective& obj, const ScalarField& w, double t_init,
                ReducedState* cache, double rel_tol = 1e-11) {
  double t = std::max(t_init, 1e-6);
  double s = ray_slope(obj, w, t, cache);
  double lo, hi, slo, shi;
  if (s > 0.0) {
    lo = t;
    slo = s;
    hi = t;
    shi = s;
    for (int k = 0; k < 90 && shi > 0.0; ++k) {
      hi *= 1.7;
      shi = ray_slope(obj, w, hi, cache);
    }
    if (shi > 0.0)
      throw SolverError("ray_peak: no peak found (slope stays positive)", shi, 90);
  } else {
    hi = t;
    shi = s;
    lo = t;
    slo = s;
    for (int k = 0; k < 90 && slo <= 0.0; ++k) {
      lo /= 1.7;
      slo = ray_slope(obj, w, lo, cache);
      if (lo < 1e-10)
        throw SolverError("ray_peak: no peak found (slope stays negative)", slo, 90);
    }
  }
  for (int k = 0; k < 80 && (hi - lo) > rel_tol * hi; ++k) {
    double mid;
    // secant guess, safeguarded by the bracket
    if (shi != slo) {
      mid = lo + slo * (hi - lo) / (slo - shi);
      if (!(mid > lo + 1e-14 * hi) || !(mid < hi - 1e-14 * hi))
        mid = 0.5 * (lo + hi);
    } else {
      mid = 0.5 * (lo + hi);
    }
    const double sm = ray_slope(obj, w, mid, cache);
    if (sm > 0.0) {
      lo = mid;
      slo = sm;
    } else {
      hi = mid;
      shi = sm;
    }
  }
  return 0.5 * (lo + hi);
}

CriticalPoint mountain_pass_impl(const ScalarField& seed_direction,
                                 const Nonlinearity& nl, const LiftingPotential& lift,
                                 const Params& params, const MpConfig& cfg) {
  const GridPtr grid = seed_direction.grid();
  if (cfg.n_path < 3) throw std::invalid_argument("mountain_pass: n_path must be >= 3");

  Objective obj{lift, params, &nl};

  // Normalize the seed in the energy seminorm so endpoint scales compare
  // across seeds.
  ScalarField dir = seed_direction;
  dir.zero_boundary();
  const double dir_e = std::sqrt(grad_energy(dir));
  if (!(dir_e > 0.0)) throw std::invalid_argument("mountain_pass: zero seed direction");
  dir *= 1.0 / dir_e;

  const ScalarField endpoint = find_endpoint(dir, nl, lift, params);

  const int n = cfg.n_path;
  PathState path;
  path.points.reserve(n);
  path.values.resize(n);
  std::vector<ReducedState> caches(n);
  std::vector<double> norms(n);
  for (int i = 0; i < n; ++i) {
    ScalarField p = endpoint;
    p *= static_cast<double>(i) / (n - 1);
    path.points.push_back(std::move(p));
    norms[i] = std::sqrt(grad_energy(path.points[i]));
    path.values[i] =
        (i == 0) ? 0.0 : obj.value(path.points[i], &caches[i]);
  }

  const double rho = norms[1];
  double alpha_barrier = std::numeric_limits<double>::infinity();
  std::vector<HistoryRow> history;
  long it = 0;

  // Phase A: path deformation. Descend the path maximizer with steps capped
  // by the local segment length, so the maximizer tracks the ridge instead of
  // flushing into a valley; reinsert and keep the interior ordered by
  // distance from 0. This locates the saddle basin.
  ScalarField u_best;
  ReducedState best_state;
  double best_value = 0.0;
  const long phase_a_cap = std::min<long>(60, cfg.max_iter);
  for (; it <= phase_a_cap; ++it) {
    const auto max_it = std::max_element(path.values.begin(), path.values.end());
    const int jmax = static_cast<int>(max_it - path.values.begin());
    if (jmax == 0 || jmax == n - 1)
      throw SolverError("mountain_pass: path collapse (maximizer at an endpoint)",
                        path.values[jmax], it);

    // Barrier sample: level at the path point nearest the sphere of radius
    // rho around 0.
    int jrho = 1;
    for (int i = 1; i < n - 1; ++i)
      if (std::abs(norms[i] - rho) < std::abs(norms[jrho] - rho)) jrho = i;
    alpha_barrier = std::min(alpha_barrier, path.values[jrho]);

    ScalarField& u = path.points[jmax];
    const double value = path.values[jmax];
    ScalarField r = obj.gradient(u, &caches[jmax]);
    ScalarField d = sobolev_direction(r, params.tol);
    double slope = inner(r, d);
    const double gdual = std::sqrt(std::max(slope, 0.0));
    const double strong = std::sqrt(inner(r, r));
    history.push_back({it, value, gdual, 0.0});

    u_best = u;
    best_state = caches[jmax];
    best_value = value;

    if (gdual <= cfg.tol_grad && strong <= 10.0 * cfg.tol_grad) {
      CriticalPoint cp = build_point(u, caches[jmax], value, gdual, lift, params, nl,
                                     it, std::move(history));
      cp.barrier_rho = rho;
      cp.barrier_alpha = alpha_barrier;
      return cp;
    }
    if (gdual <= 1e-2 * (1.0 + std::abs(value))) break;  // basin located

    double scale = 1.0;
    if (cfg.deflate && !cfg.deflate->empty())
      scale = 1.0 / deflation_factor(u, *cfg.deflate, cfg.beta);
    const double dnorm = std::sqrt(grad_energy(d));
    const double seg = std::min(norms[jmax] - (jmax > 0 ? norms[jmax - 1] : 0.0),
                                (jmax < n - 1 ? norms[jmax + 1] : norms[n - 1]) -
                                    norms[jmax]);
    if (dnorm > 0.0)
      scale = std::min(scale, 0.5 * std::max(std::abs(seg), 0.05 * norms[jmax]) / dnorm);
    ScalarField d_eff = d;
    d_eff *= scale;

    ArmijoResult step =
        armijo_step(obj, u, value, d_eff, slope * scale, caches[jmax], cfg.sym);
    if (!step.accepted) break;  // ridge too tight for the path; polish locally
    history.back().step = step.alpha * scale;
    path.points[jmax] = std::move(step.u);
    path.values[jmax] = step.value;
    caches[jmax] = std::move(step.state);
    norms[jmax] = std::sqrt(grad_energy(path.points[jmax]));

    // Reinsert: interior points stay ordered by distance from 0 in the
    // energy seminorm (endpoints fixed).
    std::vector<int> order(n - 2);
    std::iota(order.begin(), order.end(), 1);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return norms[a] < norms[b]; });
    std::vector<ScalarField> sorted_points;
    sorted_points.reserve(n);
    std::vector<ReducedState> sorted_caches(n);
    std::vector<double> sorted_norms(n), sorted_values(n);
    auto move_slot = [&](int dst, int src) {
      sorted_points.push_back(std::move(path.points[src]));
      sorted_caches[dst] = std::move(caches[src]);
      sorted_norms[dst] = norms[src];
      sorted_values[dst] = path.values[src];
    };
    move_slot(0, 0);
    for (int i = 0; i < n - 2; ++i) move_slot(i + 1, order[i]);
    move_slot(n - 1, n - 1);
    path.points = std::move(sorted_points);
    path.values = std::move(sorted_values);
    caches = std::move(sorted_caches);
    norms = std::move(sorted_norms);
  }

  // Phase B: local minimax polish from the located basin. Each iterate is
  // re-projected onto the peak of its own ray, where the pass level is a
  // minimum transversally; Sobolev descent of the peak value then converges
  // to the saddle.
  ScalarField u = std::move(u_best);
  ReducedState cache = std::move(best_state);
  double value = best_value;
  double alpha_start = 1.0;
  double peak_tol = 1e-3;
  for (; it <= cfg.max_iter; ++it) {
    double unorm = std::sqrt(grad_energy(u));
    if (!(unorm > 0.0))
      throw SolverError("mountain_pass: iterate collapsed to zero", 0.0, it);
    ScalarField w = u;
    w *= 1.0 / unorm;
    const double t = ray_peak(obj, w, unorm, &cache, peak_tol);
    u = w;
    u *= t;
    value = obj.value(u, &cache);

    ScalarField r = obj.gradient(u, &cache);
    ScalarField d = sobolev_direction(r, params.tol);
    double slope = inner(r, d);
    const double gdual = std::sqrt(std::max(slope, 0.0));
    const double strong = std::sqrt(inner(r, r));
    history.push_back({it, value, gdual, 0.0});
    // Resolve the peak well below the current gradient level: peak placement
    // error enters the accepted values quadratically, and the line search
    // compares decreases of order gdual^2.
    peak_tol = std::min(1e-3, std::max(1e-11, 1e-4 * gdual));

    if (gdual <= cfg.tol_grad && strong <= 10.0 * cfg.tol_grad) {
      CriticalPoint cp =
          build_point(u, cache, value, gdual, lift, params, nl, it, std::move(history));
      cp.barrier_rho = rho;
      cp.barrier_alpha = alpha_barrier;
      return cp;
    }

    if (cfg.deflate && !cfg.deflate->empty()) {
      const double m = deflation_factor(u, *cfg.deflate, cfg.beta);
      d *= 1.0 / m;
      slope /= m;
    }

    // Armijo on the peak-projected level.
    bool moved = false;
    double alpha = alpha_start;
    const double noise = 1e-13 * (1.0 + std::abs(value));
    double t_guess = t;
    while (alpha >= 1e-14) {
      ScalarField trial = u;
      for (std::size_t m = 0; m < trial.size(); ++m) trial[m] -= alpha * d[m];
      trial.zero_boundary();
      if (cfg.sym && cfg.sym->active()) cfg.sym->apply(trial);
      const double tnorm = std::sqrt(grad_energy(trial));
      if (tnorm > 0.0) {
        ScalarField wt = trial;
        wt *= 1.0 / tnorm;
        ReducedState st = cache;
        double tp;
        try {
          tp = ray_peak(obj, wt, t_guess, &st, peak_tol);
        } catch (const SolverError&) {
          alpha *= 0.5;
          continue;
        }
        ScalarField peaked = wt;
        peaked *= tp;
        const double val = obj.value(peaked, &st);
        bool accept = val <= value - 1e-4 * alpha * slope + noise;
        if (!accept && gdual <= 1e-2) {
          // Near the saddle the value differences drown in evaluation noise;
          // a strict decrease of the dual gradient norm is the reliable
          // acceptance signal there.
          ScalarField rt = obj.gradient(peaked, &st);
          ScalarField dt = sobolev_direction(rt, params.tol);
          const double gt = std::sqrt(std::max(inner(rt, dt), 0.0));
          accept = gt < 0.9 * gdual;
        }
        if (accept) {
          u = std::move(peaked);
          cache = std::move(st);
          value = val;
          history.back().step = alpha;
          alpha_start = std::min(1.0, 2.0 * alpha);
          moved = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!moved)
      throw SolverError("mountain_pass: local minimax stalled above tolerance", gdual,
                        it);
  }
  throw SolverError("mountain_pass: max_iter exceeded", 0.0, cfg.max_iter);
}

void require_mean_zero(const LiftingPotential& lift) {
  if (lift.kappa != 0.0)
    throw std::invalid_argument(
        "mountain_pass: requires a mean-zero boundary datum (kappa = 0)");
}

}  // namespace

CriticalPoint mountain_pass(const Nonlinearity& nl, const LiftingPotential& lift,
                            const Params& params, int n_path, double tol_grad,
                            long max_iter) {
  params.validate(true);
  require_mean_zero(lift);
  if (nl.kind != Nonlinearity::Kind::power)
    throw std::invalid_argument("mountain_pass: needs a power nonlinearity");

  EigenModes modes = dirichlet_modes(lift.chi.grid(), 1, 1e-8);
  const double lam1 = modes.values[0];
  const double q2chi2 = params.q * params.q * lift.chi_inf * lift.chi_inf;
  if (!(q2chi2 < lam1 + params.m * params.m))
    throw std::invalid_argument(
        "mountain_pass: smallness check fails (q^2 ||chi||_inf^2 >= lambda_1 + m^2)");

  MpConfig cfg;
  cfg.n_path = n_path;
  cfg.tol_grad = tol_grad;
  cfg.max_iter = max_iter;
  return mountain_pass_impl(modes.vectors[0], nl, lift, params, cfg);
}

EigenModes dirichlet_modes(const GridPtr& grid, int k, double tol) {
  if (!grid) throw std::invalid_argument("dirichlet_modes: null grid");
  if (k < 1 || k > 25) throw std::invalid_argument("dirichlet_modes: k out of range");
  const Grid& g = *grid;
  const auto& c = g.counts();
  const auto& len = g.lengths();
  const auto& h = g.spacing();

  // Candidate separated modes ordered by their exact stencil eigenvalue
  // sigma(a,b,c) = sum_axis (4/h^2) sin^2(a pi h / (2 L)).
  struct Cand {
    double sigma;
    std::array<int, 3> t;
  };
  std::vector<Cand> cands;
  const int amax = 6;
  for (int a = 1; a <= amax; ++a)
    for (int b = 1; b <= amax; ++b)
      for (int cc = 1; cc <= amax; ++cc) {
        double sigma = 0.0;
        const std::array<int, 3> t = {a, b, cc};
        for (int ax = 0; ax < 3; ++ax) {
          const double s = std::sin(0.5 * t[ax] * kPi * h[ax] / len[ax]);
          sigma += 4.0 / (h[ax] * h[ax]) * s * s;
        }
        cands.push_back({sigma, t});
      }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Cand& a, const Cand& b) { return a.sigma < b.sigma; });

  EigenModes out;
  auto wdot = [&](const ScalarField& a, const ScalarField& b) { return inner(a, b); };

  for (int m = 0; m < k; ++m) {
    const auto& t = cands[m].t;
    ScalarField x(grid);
    for (int kk = 0; kk < c[2]; ++kk)
      for (int jj = 0; jj < c[1]; ++jj)
        for (int ii = 0; ii < c[0]; ++ii)
          x[g.index(ii, jj, kk)] = std::sin(t[0] * kPi * ii / (c[0] - 1)) *
                                   std::sin(t[1] * kPi * jj / (c[1] - 1)) *
                                   std::sin(t[2] * kPi * kk / (c[2] - 1));
    x.zero_boundary();

    auto deflate = [&](ScalarField& v) {
      for (const ScalarField& w : out.vectors) {
        const double proj = wdot(v, w);
        for (std::size_t n = 0; n < v.size(); ++n) v[n] -= proj * w[n];
      }
    };
    deflate(x);
    double nx = std::sqrt(wdot(x, x));
    if (!(nx > 0.0)) throw SolverError("dirichlet_modes: degenerate start", 0.0, 0);
    x *= 1.0 / nx;

    double lambda = 0.0;
    bool converged = false;
    PcgOptions opts;
    opts.tol = 0.01 * tol;
    for (int it = 0; it < 100; ++it) {
      ScalarField y = pcg_dirichlet(x, opts);
      deflate(y);
      const double ny = std::sqrt(wdot(y, y));
      if (!(ny > 0.0)) throw SolverError("dirichlet_modes: deflated to zero", 0.0, it);
      y *= 1.0 / ny;
      const double lam = grad_energy(y);  // Rayleigh quotient of unit-norm y
      ScalarField ay = apply_dirichlet_laplacian(y);
      double res_sq = 0.0;
      for (std::size_t n = 0; n < y.size(); ++n) {
        const double e = ay[n] - lam * y[n];
        res_sq += g.volume_weight(n) * e * e;
      }
      const bool lam_settled = std::abs(lam - lambda) <= tol * std::max(lam, 1.0);
      lambda = lam;
      x = std::move(y);
      if (lam_settled && std::sqrt(res_sq) <= 100.0 * tol * std::max(lam, 1.0)) {
        converged = true;
        break;
      }
    }
    if (!converged)
      throw SolverError("dirichlet_modes: inverse iteration cap reached", lambda, 100);
    out.values.push_back(lambda);
    out.vectors.push_back(std::move(x));
    out.triples.push_back(t);
  }

  // Deflation returns them near-sorted already; enforce the ordering.
  std::vector<int> order(out.values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return out.values[a] < out.values[b]; });
  EigenModes sorted;
  for (int idx : order) {
    sorted.values.push_back(out.values[idx]);
    sorted.vectors.push_back(std::move(out.vectors[idx]));
    sorted.triples.push_back(out.triples[idx]);
  }
  return sorted;
}

double lambda1(const GridPtr& grid, double tol) {
  return dirichlet_modes(grid, 1, tol).values[0];
}

std::vector<double> lambda_k(const GridPtr& grid, int k, double tol) {
  return dirichlet_modes(grid, k, tol).values;
}

SmallnessReport smallness_check(const LiftingPotential& lift, const Params& params,
                                const std::vector<double>& lambdas) {
  if (lambdas.empty())
    throw std::invalid_argument("smallness_check: needs at least lambda_1");
  SmallnessReport rep;
  rep.lambdas = lambdas;
  const double qchi = std::abs(params.q) * lift.chi_inf;
  rep.linf_small = (qchi <= params.m);
  rep.threshold = qchi * qchi - params.m * params.m;
  rep.spectral_small = (qchi * qchi < lambdas[0] + params.m * params.m);
  rep.k_resolved = false;
  rep.k = static_cast<int>(lambdas.size()) + 1;
  for (std::size_t j = 0; j < lambdas.size(); ++j) {
    if (rep.threshold < lambdas[j]) {
      rep.k = static_cast<int>(j) + 1;
      rep.k_resolved = true;
      break;
    }
  }
  return rep;
}

MultiResult multi_solutions(const Nonlinearity& nl, const LiftingPotential& lift,
                            const Params& params, int n_targets, double tol_grad,
                            const MultiOptions& opts) {
  params.validate(true);
  require_mean_zero(lift);
  if (!nl.odd || nl.kind != Nonlinearity::Kind::power)
    throw std::invalid_argument("multi_solutions: needs an odd power nonlinearity");
  if (n_targets < 1) throw std::invalid_argument("multi_solutions: n_targets >= 1");

  const GridPtr grid = lift.chi.grid();
  const int n_seeds = opts.first_seed + n_targets + opts.extra_seeds;
  EigenModes modes = dirichlet_modes(grid, n_seeds, 1e-8);

  const double q2chi2 = params.q * params.q * lift.chi_inf * lift.chi_inf;
  if (!(q2chi2 < modes.values[0] + params.m * params.m))
    throw std::invalid_argument("multi_solutions: smallness check fails");

  const std::array<int, 3> parity = chi_parity(lift.chi);

  MultiResult result;
  std::vector<ScalarField> known;  // accepted u_i for the deflation penalty

  auto distinct = [&](const ScalarField& u) {
    for (const CriticalPoint& cp : result.solutions) {
      ScalarField dm = u, dp = u;
      dm -= cp.u;
      dp += cp.u;
      const double ref = std::sqrt(grad_energy(cp.u));
      const double d =
          std::min(std::sqrt(grad_energy(dm)), std::sqrt(grad_energy(dp)));
      if (d < 0.05 * ref) return false;
    }
    return true;
  };

  for (int s = opts.first_seed;
       s < n_seeds && static_cast<int>(result.solutions.size()) < n_targets; ++s) {
    // Pin the mode's full parity class where chi allows it: even mode index
    // means the eigenfunction is antisymmetric across that axis, odd means
    // symmetric.
    Symmetrizer sym;
    for (int a = 0; a < 3; ++a)
      sym.parity[a] = (parity[a] != 0) ? (modes.triples[s][a] % 2 == 0 ? -1 : +1) : 0;

    MpConfig cfg;
    cfg.n_path = opts.n_path;
    cfg.tol_grad = tol_grad;
    cfg.max_iter = opts.max_iter;
    cfg.deflate = &known;
    cfg.beta = opts.beta;
    cfg.sym = sym.active() ? &sym : nullptr;

    CriticalPoint cp;
    try {
      cp = mountain_pass_impl(modes.vectors[s], nl, lift, params, cfg);
    } catch (const SolverError& e) {
      result.warning += std::string("seed ") + std::to_string(s + 1) + ": " + e.what() +
                        "; ";
      continue;
    }

    if (!distinct(cp.u)) {
      // Rediscovered a known solution: retry once with a stiffer penalty and
      // no symmetry pinning.
      MpConfig retry = cfg;
      retry.beta = opts.beta * 10.0;
      retry.sym = nullptr;
      try {
        cp = mountain_pass_impl(modes.vectors[s], nl, lift, params, retry);
      } catch (const SolverError& e) {
        result.warning += std::string("seed ") + std::to_string(s + 1) +
                          " retry: " + e.what() + "; ";
        continue;
      }
      if (!distinct(cp.u)) {
        result.warning +=
            "seed " + std::to_string(s + 1) + ": duplicate solution skipped; ";
        continue;
      }
    }

    // Keep the chain the multiplicity theorem promises: levels and gradient
    // norms both grow along the sequence. A catch that breaks the order
    // (possible when split states of different axes interleave) is skipped
    // and the next eigenmode seed is consumed instead.
    if (!result.solutions.empty()) {
      const CriticalPoint& last = result.solutions.back();
      if (!(cp.value > last.value &&
            norm(cp.u, NormKind::gradL2) > norm(last.u, NormKind::gradL2))) {
        result.warning += "seed " + std::to_string(s + 1) +
                          ": non-monotone catch skipped (value " + std::to_string(cp.value) +
                          "); ";
        continue;
      }
    }
    known.push_back(cp.u);
    result.solutions.push_back(std::move(cp));
  }

  std::stable_sort(result.solutions.begin(), result.solutions.end(),
                   [](const CriticalPoint& a, const CriticalPoint& b) {
                     return norm(a.u, NormKind::gradL2) < norm(b.u, NormKind::gradL2);
                   });
  result.complete = static_cast<int>(result.solutions.size()) >= n_targets;
  if (!result.complete)
    result.warning += "found " + std::to_string(result.solutions.size()) + " of " +
                      std::to_string(n_targets) + " targets; ";
  return result;
}

}  // namespace kgm
