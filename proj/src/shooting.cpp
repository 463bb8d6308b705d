#include "polyshoot/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "polyshoot/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace polyshoot {

namespace {

// Profile holding only the origin and the outer radius, enough for
// boundary_derivatives.
StackProfile endpoint_profile(const ProblemSpec& spec, std::span<const double> a, double radius,
                              const IvpState& state) {
  StackProfile p;
  p.spec = spec;
  p.grid = RadialGrid({0.0, radius});
  const int levels = spec.stack_size();
  p.values.assign(levels, std::vector<double>(2, 0.0));
  p.dvalues.assign(levels, std::vector<double>(2, 0.0));
  for (int l = 0; l < levels; ++l) {
    p.values[l][0] = a[l];
    p.values[l][1] = state[2 * l];
    p.dvalues[l][1] = state[2 * l + 1];
  }
  return p;
}

// Boundary residual made dimensionless. Each entry is divided by the origin
// value of its level and carries the matching power of R. With
// `cancellation` set, Dirichlet entry k is instead divided by the largest
// stack term max_{l <= k/2} a_{j,l} R^{2l} entering its recurrence, which is
// the scale at which the entry can be resolved.
std::vector<double> scaled_residual(const StackProfile& profile, bool cancellation = false) {
  const ProblemSpec& spec = profile.spec;
  const double radius = profile.radius();
  const std::vector<double> raw = bc_residual(profile);
  std::vector<double> out(raw.size());
  std::size_t i = 0;
  for (int j = 0; j < spec.m(); ++j) {
    for (int k = 0; k < spec.alphas[j]; ++k, ++i) {
      double ref = 0.0;
      double power = 0.0;
      switch (spec.bc) {
        case BoundaryKind::Dirichlet:
          ref = std::abs(profile.level(j, 0)[0]);
          for (int l = 1; cancellation && 2 * l <= k; ++l)
            ref = std::max(ref, std::abs(profile.level(j, l)[0]) * std::pow(radius, 2.0 * l));
          power = k;
          break;
        case BoundaryKind::Navier:
          ref = std::abs(profile.level(j, k)[0]);
          break;
        case BoundaryKind::Natural:
          ref = std::abs(profile.level(j, 2 * (k / 2))[0]);
          power = k % 2;
          break;
      }
      out[i] = raw[i] * std::pow(radius, power) / (ref > 0.0 ? ref : 1.0);
    }
  }
  return out;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Dense solve with partial pivoting; false if singular.
bool solve_linear(std::vector<std::vector<double>> a, std::vector<double>& b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (!(std::abs(a[piv][c]) > 0.0) || !std::isfinite(a[piv][c])) return false;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t c = n; c-- > 0;) {
    double s = b[c];
    for (std::size_t k = c + 1; k < n; ++k) s -= a[c][k] * b[k];
    b[c] = s / a[c][c];
    if (!std::isfinite(b[c])) return false;
  }
  return true;
}

struct Evaluation {
  bool blown = false;
  std::vector<double> f;
  double norm = std::numeric_limits<double>::infinity();  // max norm, cancellation scaling
  double merit = std::numeric_limits<double>::infinity();  // Euclidean norm
};

class ShootingMap {
 public:
  ShootingMap(const ProblemSpec& spec, double a0, const IntegratorOptions& opts)
      : spec_(spec), a0_(a0), opts_(opts) {}

  ShootingUnknowns unpack(const std::vector<double>& x) const {
    ShootingUnknowns u;
    u.a.resize(x.size());
    u.a[0] = a0_;
    for (std::size_t i = 1; i < x.size(); ++i) u.a[i] = std::exp(x[i - 1]);
    u.radius = std::exp(x.back());
    return u;
  }

  std::vector<double> pack(const ShootingUnknowns& u) const {
    std::vector<double> x(u.a.size());
    for (std::size_t i = 1; i < u.a.size(); ++i) x[i - 1] = std::log(u.a[i]);
    x.back() = std::log(u.radius);
    return x;
  }

  Evaluation operator()(const std::vector<double>& x) const {
    Evaluation e;
    const ShootingUnknowns u = unpack(x);
    try {
      const IvpState end = integrate_endpoint(spec_, u.a, u.radius, opts_);
      const StackProfile p = endpoint_profile(spec_, u.a, u.radius, end);
      e.f = scaled_residual(p);
      e.norm = max_abs(scaled_residual(p, true));
      double ss = 0.0;
      for (double v : e.f) ss += v * v;
      e.merit = std::sqrt(ss);
      if (!std::isfinite(e.merit)) {
        e.blown = true;
        e.norm = e.merit = std::numeric_limits<double>::infinity();
      }
    } catch (const Overflow&) {
      e.blown = true;
    } catch (const StepLimitExceeded&) {
      e.blown = true;
    }
    return e;
  }

 private:
  const ProblemSpec& spec_;
  double a0_;
  const IntegratorOptions& opts_;
};

void screen(const StackProfile& profile, double tol) {
  const ProblemSpec& spec = profile.spec;
  const std::size_t last = profile.grid.size() - 1;
  for (int j = 0; j < spec.m(); ++j) {
    const auto& u = profile.level(j, 0);
    const auto& du = profile.dlevel(j, 0);
    double scale = 0.0;
    for (double v : u) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < last; ++i) {
      if (u[i] < -tol * scale)
        throw NewtonStalled(0.0, "converged profile of u_" + std::to_string(j + 1) + " is not positive at r = " +
                                     std::to_string(profile.grid[i]));
      if (i > 0 && du[i] > tol * scale)
        throw NewtonStalled(0.0, "converged profile of u_" + std::to_string(j + 1) +
                                     " is not decreasing at r = " + std::to_string(profile.grid[i]));
    }
  }
}

}  // namespace

std::vector<double> bc_residual(const StackProfile& profile) {
  const ProblemSpec& spec = profile.spec;
  const std::size_t last = profile.grid.size() - 1;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(spec.stack_size()));
  switch (spec.bc) {
    case BoundaryKind::Dirichlet:
      for (int j = 0; j < spec.m(); ++j) {
        const auto d = boundary_derivatives(profile, j);
        out.insert(out.end(), d.begin(), d.end());
      }
      break;
    case BoundaryKind::Navier:
      for (int j = 0; j < spec.m(); ++j)
        for (int k = 0; k < spec.alphas[j]; ++k) out.push_back(profile.level(j, k)[last]);
      break;
    case BoundaryKind::Natural:
      for (int j = 0; j < spec.m(); ++j)
        for (int k = 0; k < spec.alphas[j]; ++k) {
          const int lv = 2 * (k / 2);
          out.push_back(k % 2 == 0 ? profile.level(j, lv)[last] : profile.dlevel(j, lv)[last]);
        }
      break;
  }
  return out;
}

std::vector<double> bc_residual(const ProblemSpec& spec, const ShootingUnknowns& x, const IntegratorOptions& opts) {
  try {
    const IvpState end = integrate_endpoint(spec, x.a, x.radius, opts);
    return bc_residual(endpoint_profile(spec, x.a, x.radius, end));
  } catch (const BlowUpBeforeRadius&) {
    throw;
  } catch (const Overflow& e) {
    throw BlowUpBeforeRadius(e.radius(), e.what());
  }
}

namespace {

// Polynomials in rho^2: c[n] is the coefficient of rho^{2n}.
using EvenPoly = std::vector<double>;

EvenPoly neg_laplacian(const EvenPoly& c, double n) {
  EvenPoly out(c.size() > 1 ? c.size() - 1 : 1, 0.0);
  for (std::size_t i = 1; i < c.size(); ++i) out[i - 1] = -c[i] * 2.0 * i * (2.0 * i + n - 2.0);
  return out;
}

// Solves (-Delta)^q v = g on the unit ball with v^{(k)}(1) = 0, k < q.
EvenPoly dirichlet_piece(const EvenPoly& g, int q, double n) {
  EvenPoly v = g;
  for (int i = 0; i < q; ++i) {
    EvenPoly up(v.size() + 1, 0.0);
    for (std::size_t k = 0; k < v.size(); ++k) up[k + 1] = -v[k] / ((2.0 * k + 2.0) * (2.0 * k + n));
    v = up;
  }
  // add sum_{i<q} c_i rho^{2i} so that the first q derivatives vanish at 1
  std::vector<std::vector<double>> m(q, std::vector<double>(q));
  std::vector<double> rhs(q);
  auto deriv_at_one = [](std::size_t power, int k) {
    double f = 1.0;
    for (int i = 0; i < k; ++i) f *= static_cast<double>(power) - i;
    return f;
  };
  for (int k = 0; k < q; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) acc += v[i] * deriv_at_one(2 * i, k);
    rhs[k] = -acc;
    for (int i = 0; i < q; ++i) m[k][i] = deriv_at_one(2 * i, k);
  }
  solve_linear(m, rhs);
  for (int i = 0; i < q; ++i) v[i] += rhs[i];
  return v;
}

}  // namespace

ShootingUnknowns default_unknowns(const ProblemSpec& spec, double normalization) {
  require_valid(spec);
  const double n = spec.dimension;
  ShootingUnknowns u;
  double radius = 1.0;
  std::vector<std::vector<double>> origin(spec.m());
  for (int j = 0; j < spec.m(); ++j) {
    const int alpha = spec.alphas[j];
    const int piece = spec.bc == BoundaryKind::Dirichlet ? alpha : spec.bc == BoundaryKind::Navier ? 1 : 2;
    std::vector<double> levels(alpha);
    EvenPoly forcing{1.0};
    // pieces from the tail back to u_j
    std::vector<int> starts;
    for (int k = 0; k < alpha; k += piece) starts.push_back(k);
    for (auto it = starts.rbegin(); it != starts.rend(); ++it) {
      const int q = std::min(piece, alpha - *it);
      EvenPoly v = dirichlet_piece(forcing, q, n);
      forcing = v;
      for (int i = 0; i < q; ++i) {
        levels[*it + i] = v[0];
        v = neg_laplacian(v, n);
      }
    }
    const double u0 = levels[0];
    for (double& v : levels) v /= u0;
    origin[j] = levels;
    // (-Delta)^alpha of the normalized profile is 1/u0; balance it against u^p ~ 1
    if (spec.pure_power()) radius = std::max(radius, std::pow(1.0 / u0, 1.0 / (2.0 * alpha)));
  }
  for (int j = 0; j < spec.m(); ++j)
    for (int k = 0; k < spec.alphas[j]; ++k)
      u.a.push_back(normalization * origin[j][k] / std::pow(radius, 2.0 * k));
  u.radius = radius;
  return u;
}

SolutionRecord solve_bvp(const ProblemSpec& spec, const ShootingUnknowns& init, const ShootOptions& opts) {
  require_valid(spec);
  const int levels = spec.stack_size();
  if (static_cast<int>(init.a.size()) != levels) throw DomainError("initial stack has the wrong length");
  if (!(init.radius > 0.0)) throw DomainError("initial radius must be positive");
  for (double v : init.a)
    if (!(v > 0.0)) throw DomainError("initial stack values must be positive");
  if (!(opts.newton_tol > 0.0) || !(opts.fd_jacobian_step > 0.0)) throw DomainError("tolerances must be positive");

  const ShootingMap map(spec, init.a[0], opts.ivp);
  std::vector<double> x = map.pack(init);
  const std::size_t n = x.size();

  Evaluation cur = map(x);
  for (int i = 0; cur.blown && i < opts.max_halvings; ++i) {
    x.back() -= std::log(2.0);
    cur = map(x);
  }
  if (cur.blown) throw BlowUpDominates("every trial radius blows up before the boundary");

  int iter = 0;
  int polish = 0;
  double mu = 1e-3;
  double best = cur.norm;
  for (; iter < opts.max_newton_iters; ++iter) {
    if (cur.norm < opts.newton_tol) {
      // a few extra steps while they still pay off
      if (polish >= 3) break;
      ++polish;
    }
    std::vector<std::vector<double>> jac(n, std::vector<double>(n));
    for (std::size_t c = 0; c < n; ++c) {
      const double h = opts.fd_jacobian_step * (1.0 + std::abs(x[c]));
      std::vector<double> xp = x;
      xp[c] += h;
      Evaluation ep = map(xp);
      double step = h;
      if (ep.blown) {
        xp[c] = x[c] - h;
        ep = map(xp);
        step = -h;
      }
      if (ep.blown) throw NewtonStalled(best, "Jacobian evaluation blew up");
      for (std::size_t r = 0; r < n; ++r) jac[r][c] = (ep.f[r] - cur.f[r]) / step;
    }
    std::vector<double> dx(cur.f.size());
    for (std::size_t r = 0; r < n; ++r) dx[r] = -cur.f[r];
    const bool newton_ok = solve_linear(jac, dx);
    double clip = 1.0;
    double level = 0.0;  // |J^{-1} F|, the natural monotonicity level
    if (newton_ok) {
      for (double d : dx) level += d * d;
      level = std::sqrt(level);
      const double big = max_abs(dx);
      if (big > opts.max_log_step) clip = opts.max_log_step / big;
    }

    // Accept on either the residual decrease or the affine-invariant test
    // |J^{-1} F(x + t dx)| <= (1 - t/4) |J^{-1} F(x)|.
    double t = 1.0;
    bool accepted = false;
    bool all_blown = true;
    for (int h = 0; newton_ok && h <= opts.max_halvings; ++h, t *= 0.5) {
      std::vector<double> xt = x;
      for (std::size_t i = 0; i < n; ++i) xt[i] += t * clip * dx[i];
      Evaluation et = map(xt);
      if (et.blown) continue;
      all_blown = false;
      bool ok = et.merit < (1.0 - 1e-4 * t) * cur.merit;
      if (!ok) {
        std::vector<double> bar(n);
        for (std::size_t r = 0; r < n; ++r) bar[r] = -et.f[r];
        if (solve_linear(jac, bar)) {
          double nb = 0.0;
          for (double d : bar) nb += d * d;
          ok = std::sqrt(nb) <= (1.0 - 0.25 * t * clip) * level;
        }
      }
      if (ok) {
        x = std::move(xt);
        cur = std::move(et);
        accepted = true;
        break;
      }
    }
    // short or failed Newton steps: Levenberg-Marquardt on the same Jacobian
    if (!accepted || t < 0.25) {
      std::vector<std::vector<double>> jtj(n, std::vector<double>(n, 0.0));
      std::vector<double> jtf(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k)
          for (std::size_t r = 0; r < n; ++r) jtj[i][k] += jac[r][i] * jac[r][k];
        for (std::size_t r = 0; r < n; ++r) jtf[i] -= jac[r][i] * cur.f[r];
      }
      for (int tries = 0; tries < 12; ++tries, mu *= 4.0) {
        auto damped = jtj;
        for (std::size_t i = 0; i < n; ++i) damped[i][i] += mu * (jtj[i][i] + 1e-12);
        std::vector<double> step = jtf;
        if (!solve_linear(damped, step)) continue;
        const double big = max_abs(step);
        if (big > opts.max_log_step)
          for (double& d : step) d *= opts.max_log_step / big;
        std::vector<double> xt = x;
        for (std::size_t i = 0; i < n; ++i) xt[i] += step[i];
        Evaluation et = map(xt);
        if (!et.blown) all_blown = false;
        if (!et.blown && et.merit < cur.merit) {
          x = std::move(xt);
          cur = std::move(et);
          accepted = true;
          mu = std::max(mu / 16.0, 1e-8);
          break;
        }
      }
    }
    best = std::min(best, cur.norm);
    if (!accepted) {
      if (cur.norm < opts.newton_tol) break;
      if (all_blown) throw BlowUpDominates("every damped Newton trial blows up before the boundary");
      throw NewtonStalled(best, "no descent step; best scaled residual " + std::to_string(best));
    }
  }
  if (!(cur.norm < opts.newton_tol))
    throw NewtonStalled(best, "no convergence in " + std::to_string(opts.max_newton_iters) +
                                  " Newton iterations; best scaled residual " + std::to_string(best));

  const ShootingUnknowns sol = map.unpack(x);
  StackProfile profile = integrate(spec, sol.a, sol.radius, opts.ivp);
  if (spec.pure_power()) profile = rescale_to_unit(profile);

  double sup = 0.0;
  for (double v : profile.level(0, 0)) sup = std::max(sup, std::abs(v));
  if (sup < opts.trivial_threshold) throw ConvergedToTrivial("converged to the trivial solution");
  screen(profile, opts.bc_tol);

  SolutionRecord rec;
  rec.initial_stack = profile.origin_stack();
  rec.shoot_radius = sol.radius;
  rec.bc_residual_norm = max_abs(scaled_residual(profile, true));
  rec.ode_defect_norm = residual(spec, profile);
  rec.newton_iterations = iter;
  rec.profile = std::move(profile);
  return rec;
}

ShootingUnknowns random_start(const ProblemSpec& spec, std::uint64_t seed, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> loga(std::log(1e-2), std::log(1e2));
  std::uniform_real_distribution<double> rad(0.5, 5.0);
  ShootingUnknowns u;
  u.a.resize(static_cast<std::size_t>(spec.stack_size()));
  u.a[0] = 1.0;
  for (std::size_t i = 1; i < u.a.size(); ++i) u.a[i] = std::exp(loga(rng));
  u.radius = rad(rng);
  return u;
}

namespace {

StartOutcome run_start(const ProblemSpec& spec, const ShootOptions& opts, int index,
                       std::optional<SolutionRecord>& out) {
  StartOutcome o;
  o.start = random_start(spec, opts.rng_seed, index);
  try {
    out = solve_bvp(spec, o.start, opts);
    o.converged = true;
  } catch (const Error& e) {
    o.failure = e.what();
  }
  return o;
}

MultistartResult merge(std::vector<StartOutcome> outcomes, std::vector<std::optional<SolutionRecord>> recs) {
  MultistartResult res;
  res.outcomes = std::move(outcomes);
  for (auto& r : recs)
    if (r) res.records.push_back(std::move(*r));
  return res;
}

}  // namespace

MultistartResult multistart(const ProblemSpec& spec, const ShootOptions& opts) {
  require_valid(spec);
  if (!spec.pure_power()) throw DomainError("multistart needs a pure-power problem");
  const int count = std::max(opts.multistart_count, 0);
  std::vector<StartOutcome> outcomes(static_cast<std::size_t>(count));
  std::vector<std::optional<SolutionRecord>> recs(static_cast<std::size_t>(count));
#ifdef _OPENMP
  const int threads = opts.jobs > 0 ? opts.jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
  for (int i = 0; i < count; ++i) outcomes[i] = run_start(spec, opts, i, recs[i]);
  return merge(std::move(outcomes), std::move(recs));
}

MultistartResult multistart_serial(const ProblemSpec& spec, const ShootOptions& opts) {
  require_valid(spec);
  if (!spec.pure_power()) throw DomainError("multistart needs a pure-power problem");
  const int count = std::max(opts.multistart_count, 0);
  std::vector<StartOutcome> outcomes(static_cast<std::size_t>(count));
  std::vector<std::optional<SolutionRecord>> recs(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) outcomes[i] = run_start(spec, opts, i, recs[i]);
  return merge(std::move(outcomes), std::move(recs));
}

double profile_distance(const StackProfile& a, const StackProfile& b) {
  const auto& u = a.level(0, 0);
  const auto& v = b.level(0, 0);
  if (u.size() != v.size()) throw DomainError("profiles live on different grids");
  double diff = 0.0, su = 0.0, sv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    diff = std::max(diff, std::abs(u[i] - v[i]));
    su = std::max(su, std::abs(u[i]));
    sv = std::max(sv, std::abs(v[i]));
  }
  const double scale = std::max(su, sv);
  return scale > 0.0 ? diff / scale : 0.0;
}

std::vector<Cluster> cluster_solutions(const std::vector<SolutionRecord>& records, double tol_rel) {
  std::vector<Cluster> clusters;
  for (std::size_t i = 0; i < records.size(); ++i) {
    bool placed = false;
    for (auto& c : clusters) {
      if (profile_distance(records[c.members.front()].profile, records[i].profile) <= tol_rel) {
        c.members.push_back(i);
        if (records[i].bc_residual_norm < records[c.representative].bc_residual_norm) c.representative = i;
        placed = true;
        break;
      }
    }
    if (!placed) clusters.push_back(Cluster{i, {i}});
  }
  return clusters;
}

ProblemSpec decomposed_spec(const ProblemSpec& spec) {
  require_valid(spec);
  if (spec.bc == BoundaryKind::Dirichlet)
    throw UnsupportedBoundaryKind("Dirichlet problems have no lower-order decomposition");
  if (!spec.pure_power()) throw UnsupportedBoundaryKind("decomposition needs a pure-power problem");
  ProblemSpec out;
  out.dimension = spec.dimension;
  out.bc = BoundaryKind::Dirichlet;
  const int piece = spec.bc == BoundaryKind::Navier ? 1 : 2;
  for (int j = 0; j < spec.m(); ++j) {
    for (int k = 0; k < spec.alphas[j]; k += piece) {
      const int order = std::min(piece, spec.alphas[j] - k);
      out.alphas.push_back(order);
      out.exponents.push_back(k + order >= spec.alphas[j] ? spec.exponents[j] : 1.0);
    }
  }
  return out;
}

SolutionRecord navier_decomposition_solve(const ProblemSpec& spec, const ShootingUnknowns& init,
                                          const ShootOptions& opts) {
  const ProblemSpec dec = decomposed_spec(spec);
  // the flattened level order of the decomposed system is the original stack
  SolutionRecord rec = solve_bvp(dec, init, opts);
  rec.profile.spec = spec;
  rec.bc_residual_norm = max_abs(scaled_residual(rec.profile, true));
  rec.ode_defect_norm = residual(spec, rec.profile);
  return rec;
}

SolutionRecord navier_decomposition_solve(const ProblemSpec& spec, const ShootOptions& opts) {
  return navier_decomposition_solve(spec, default_unknowns(spec), opts);
}

nlohmann::json to_json(const SolutionRecord& rec, const std::string& profile_csv_path) {
  nlohmann::json j;
  j["spec"] = to_json(rec.profile.spec);
  j["initial_stack"] = rec.initial_stack;
  j["shoot_radius"] = rec.shoot_radius;
  j["bc_residual_norm"] = rec.bc_residual_norm;
  j["ode_defect_norm"] = rec.ode_defect_norm;
  j["newton_iterations"] = rec.newton_iterations;
  j["profile_csv_path"] = profile_csv_path;
  return j;
}

}  // namespace polyshoot
