#include "polyshoot/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "polyshoot/errors.hpp"

namespace polyshoot {

double tail_forcing(const ProblemSpec& spec, int chain, double r, std::span<const double> level_values) {
  if (!spec.pure_power()) return spec.linear_rhs[chain](r);
  const int next = (chain + 1) % spec.m();
  const double v = level_values[spec.level_index(next, 0)];
  return std::pow(std::abs(v), spec.exponents[chain]);
}

void rhs(const ProblemSpec& spec, double r, std::span<const double> state, std::span<double> dstate) {
  const int levels = spec.stack_size();
  // level values live in the even slots; gather once for the tail forcing
  std::array<double, 64> buf{};
  std::vector<double> heap;
  double* vals = buf.data();
  if (levels > static_cast<int>(buf.size())) {
    heap.resize(levels);
    vals = heap.data();
  }
  for (int l = 0; l < levels; ++l) vals[l] = state[2 * l];
  const std::span<const double> values(vals, static_cast<std::size_t>(levels));

  const double damping = (spec.dimension - 1.0) / r;
  int l = 0;
  for (int j = 0; j < spec.m(); ++j) {
    for (int k = 0; k < spec.alphas[j]; ++k, ++l) {
      const double next = (k + 1 < spec.alphas[j]) ? vals[l + 1] : tail_forcing(spec, j, r, values);
      dstate[2 * l] = state[2 * l + 1];
      dstate[2 * l + 1] = -next - damping * state[2 * l + 1];
    }
  }
}

IvpState rhs(const ProblemSpec& spec, double r, const IvpState& state) {
  IvpState d(state.size());
  rhs(spec, r, state, d);
  return d;
}

namespace {

// Next-level values T_l at the origin and a bound on the r^4 coefficient.
struct OriginSeries {
  std::vector<double> next;
  double quartic = 0.0;
};

OriginSeries origin_series(const ProblemSpec& spec, std::span<const double> a) {
  const int levels = spec.stack_size();
  const double n = spec.dimension;
  OriginSeries os;
  os.next.resize(levels);
  int l = 0;
  for (int j = 0; j < spec.m(); ++j)
    for (int k = 0; k < spec.alphas[j]; ++k, ++l)
      os.next[l] = (k + 1 < spec.alphas[j]) ? a[l + 1] : tail_forcing(spec, j, 0.0, a);

  // |Delta next_l (0)| for each level
  auto laplacian_of_next = [&](int j, int k, int lv) -> double {
    if (k + 2 < spec.alphas[j]) return std::abs(a[lv + 2]);
    if (k + 2 == spec.alphas[j]) return std::abs(os.next[lv + 1]);  // Delta w_tail = -g
    // next is the forcing itself
    if (!spec.pure_power()) {
      const double h = 1e-3;
      const auto& f = spec.linear_rhs[j];
      return n * std::abs(f(2 * h) - 2 * f(h) + f(0.0)) / (h * h);
    }
    const int nc = (j + 1) % spec.m();
    const int head = spec.level_index(nc, 0);
    const double p = spec.exponents[j];
    const double v0 = std::abs(a[head]);
    const double slope = v0 > 0.0 ? p * std::pow(v0, p - 1.0) : (p == 1.0 ? 1.0 : 0.0);
    return slope * std::abs(os.next[head]);
  };
  l = 0;
  for (int j = 0; j < spec.m(); ++j)
    for (int k = 0; k < spec.alphas[j]; ++k, ++l)
      os.quartic = std::max(os.quartic, laplacian_of_next(j, k, l) / (8.0 * n * (n + 2.0)));
  return os;
}

double series_tolerance(std::span<const double> a, const IntegratorOptions& opts) {
  double amax = 0.0;
  for (double v : a) amax = std::max(amax, std::abs(v));
  return opts.abs_tol + opts.rel_tol * amax;
}

IvpState series_state(const ProblemSpec& spec, std::span<const double> a, const OriginSeries& os, double r0) {
  const int levels = spec.stack_size();
  const double n = spec.dimension;
  IvpState y(2 * static_cast<std::size_t>(levels));
  for (int l = 0; l < levels; ++l) {
    y[2 * l] = a[l] - r0 * r0 * os.next[l] / (2.0 * n);
    y[2 * l + 1] = -r0 * os.next[l] / n;
  }
  return y;
}

}  // namespace

IvpState series_start(const ProblemSpec& spec, std::span<const double> a, double r0, const IntegratorOptions& opts) {
  if (static_cast<int>(a.size()) != spec.stack_size()) throw DomainError("initial stack has the wrong length");
  const auto os = origin_series(spec, a);
  const double estimate = os.quartic * std::pow(r0, 4);
  if (estimate > series_tolerance(a, opts))
    throw SeriesRadiusTooLarge("series start radius " + std::to_string(r0) + " too large (quartic term " +
                               std::to_string(estimate) + ")");
  return series_state(spec, a, os, r0);
}

double safe_series_radius(const ProblemSpec& spec, std::span<const double> a, const IntegratorOptions& opts) {
  const auto os = origin_series(spec, a);
  if (os.quartic <= 0.0) return std::numeric_limits<double>::infinity();
  const double tol = 0.1 * series_tolerance(a, opts);
  // value error c r^4 and derivative error 4 c r^3 both within tol
  return std::min(std::pow(tol / os.quartic, 0.25), std::cbrt(tol / (4.0 * os.quartic)));
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

// Continuous extension of one accepted step.
struct DenseStep {
  double r0 = 0.0, h = 0.0;
  std::vector<double> c1, c2, c3, c4, c5;

  void eval(double r, std::span<double> y) const {
    const double th = (r - r0) / h;
    const double th1 = 1.0 - th;
    for (std::size_t i = 0; i < c1.size(); ++i)
      y[i] = c1[i] + th * (c2[i] + th1 * (c3[i] + th * (c4[i] + th1 * c5[i])));
  }
};

template <class OnStep>
IvpState run_stepper(const ProblemSpec& spec, IvpState y, double r, double r_end, const IntegratorOptions& opts,
                     OnStep&& on_step) {
  const std::size_t n = y.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), ynew(n);
  DenseStep dense;
  dense.c1.resize(n);
  dense.c2.resize(n);
  dense.c3.resize(n);
  dense.c4.resize(n);
  dense.c5.resize(n);

  auto f = [&](double x, const std::vector<double>& s, std::vector<double>& d) { rhs(spec, x, s, d); };
  f(r, y, k1);
  // blow-up is measured against the size of the starting state
  double y0max = 1.0;
  for (double v : y) y0max = std::max(y0max, std::abs(v));
  const double limit = opts.blowup_threshold * y0max;
  double h = std::min(0.01 * (r_end - r), 1e-3 * std::max(1.0, r_end));
  long steps = 0;
  while (r < r_end) {
    if (++steps > opts.max_steps) throw StepLimitExceeded("step limit exceeded at r = " + std::to_string(r));
    bool last = false;
    if (r + h >= r_end || r + 1.01 * h >= r_end) {
      h = r_end - r;
      last = true;
    }
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    f(r + c2 * h, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    f(r + c3 * h, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(r + c4 * h, tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(r + c5 * h, tmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    f(r + h, tmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    const double r_new = last ? r_end : r + h;
    f(r_new, ynew, k7);

    double err = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = opts.abs_tol + opts.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err = std::max(err, std::abs(e) / sc);
      finite = finite && std::isfinite(ynew[i]);
    }
    if (!finite || !std::isfinite(err)) {
      h *= 0.25;
      if (h < 1e-14 * std::max(1.0, r)) throw Overflow(r, "solution blew up near r = " + std::to_string(r));
      continue;
    }
    if (err > 1.0) {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      if (h < 1e-14 * std::max(1.0, r)) throw Overflow(r, "step size underflow near r = " + std::to_string(r));
      continue;
    }

    for (std::size_t i = 0; i < n; ++i) {
      const double dy = ynew[i] - y[i];
      dense.c1[i] = y[i];
      dense.c2[i] = dy;
      dense.c3[i] = h * k1[i] - dy;
      dense.c4[i] = dy - h * k7[i] - dense.c3[i];
      dense.c5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
    }
    dense.r0 = r;
    dense.h = h;
    on_step(r, r_new, dense);

    double ymax = 0.0;
    for (double v : ynew) ymax = std::max(ymax, std::abs(v));
    r = r_new;
    y.swap(ynew);
    k1.swap(k7);
    if (ymax > limit) throw Overflow(r, "solution blew up near r = " + std::to_string(r));
    h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));
  }
  return y;
}

double start_radius(const ProblemSpec& spec, std::span<const double> a, double r_end, const IntegratorOptions& opts) {
  return std::min({opts.r_series * r_end, safe_series_radius(spec, a, opts), 0.5 * r_end});
}

}  // namespace

IvpState integrate_endpoint(const ProblemSpec& spec, std::span<const double> a, double r_end,
                            const IntegratorOptions& opts) {
  if (!(r_end > 0.0)) throw DomainError("integration radius must be positive");
  const double r0 = start_radius(spec, a, r_end, opts);
  IvpState y = series_start(spec, a, r0, opts);
  return run_stepper(spec, std::move(y), r0, r_end, opts, [](double, double, const DenseStep&) {});
}

StackProfile integrate(const ProblemSpec& spec, std::span<const double> a, double r_end,
                       const IntegratorOptions& opts) {
  if (opts.method == IvpMethod::Picard) return picard_solve(spec, a, r_end, opts);
  if (!(r_end > 0.0)) throw DomainError("integration radius must be positive");
  const int levels = spec.stack_size();
  if (static_cast<int>(a.size()) != levels) throw DomainError("initial stack has the wrong length");

  StackProfile prof;
  prof.spec = spec;
  prof.grid = RadialGrid::uniform(r_end, opts.grid_intervals);
  const std::size_t nodes = prof.grid.size();
  prof.values.assign(levels, std::vector<double>(nodes, 0.0));
  prof.dvalues.assign(levels, std::vector<double>(nodes, 0.0));

  auto store = [&](std::size_t i, std::span<const double> y) {
    for (int l = 0; l < levels; ++l) {
      prof.values[l][i] = y[2 * l];
      prof.dvalues[l][i] = y[2 * l + 1];
    }
  };

  const double r0 = start_radius(spec, a, r_end, opts);
  const auto os = origin_series(spec, a);
  IvpState y0 = series_start(spec, a, r0, opts);
  std::size_t next = 0;
  for (; next < nodes && prof.grid[next] <= r0; ++next) {
    if (prof.grid[next] == 0.0) {
      for (int l = 0; l < levels; ++l) prof.values[l][next] = a[l];
    } else {
      store(next, series_state(spec, a, os, prof.grid[next]));
    }
  }
  std::vector<double> buf(y0.size());
  const IvpState yend =
      run_stepper(spec, std::move(y0), r0, r_end, opts, [&](double, double r_new, const DenseStep& dense) {
        while (next < nodes && prof.grid[next] <= r_new) {
          dense.eval(prof.grid[next], buf);
          store(next, buf);
          ++next;
        }
      });
  store(nodes - 1, yend);
  return prof;
}

}  // namespace polyshoot
