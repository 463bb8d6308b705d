// Picard iteration on the origin-anchored Volterra form
//   w_l(r) = a_l - int_0^r K(r,s) next_l(s) ds,
//   K(r,s) = s (1 - (s/r)^{N-2}) / (N-2),
// evaluated through the running moments A_l(r) = int_0^r s next_l and
// B_l(r) = int_0^r s^{N-1} next_l, so that
//   w_l = a_l - (A_l - r^{2-N} B_l) / (N-2),  w_l' = -r^{1-N} B_l.
// Shares no code with the Runge-Kutta path apart from the forcing.

#include <algorithm>
#include <cmath>

#include "polyshoot/errors.hpp"
#include "polyshoot/integrator.hpp"
#include "quadrature.hpp"

namespace polyshoot {

StackProfile picard_solve(const ProblemSpec& spec, std::span<const double> a, double r_end,
                          const IntegratorOptions& opts) {
  if (!(r_end > 0.0)) throw DomainError("integration radius must be positive");
  const int levels = spec.stack_size();
  if (static_cast<int>(a.size()) != levels) throw DomainError("initial stack has the wrong length");
  const int n = spec.dimension;
  const double nm2 = n - 2.0;

  StackProfile prof;
  prof.spec = spec;
  prof.grid = RadialGrid::uniform(r_end, opts.grid_intervals);
  const std::size_t nodes = prof.grid.size();
  const std::vector<double>& r = prof.grid.nodes();
  auto& w = prof.values;
  auto& dw = prof.dvalues;
  w.assign(levels, std::vector<double>(nodes, 0.0));
  dw.assign(levels, std::vector<double>(nodes, 0.0));
  for (int l = 0; l < levels; ++l) w[l][0] = a[l];

  // next_l at every node and its running moments
  std::vector<std::vector<double>> nxt(levels, std::vector<double>(nodes, 0.0));
  std::vector<std::vector<double>> mom_a(levels, std::vector<double>(nodes, 0.0));
  std::vector<std::vector<double>> mom_b(levels, std::vector<double>(nodes, 0.0));
  std::vector<double> head(levels);

  auto refresh_integrands = [&](std::size_t i) {
    for (int l = 0; l < levels; ++l) head[l] = w[l][i];
    int l = 0;
    for (int j = 0; j < spec.m(); ++j) {
      for (int k = 0; k < spec.alphas[j]; ++k, ++l) {
        const double next = (k + 1 < spec.alphas[j]) ? head[l + 1] : tail_forcing(spec, j, r[i], head);
        nxt[l][i] = next;
      }
    }
  };
  refresh_integrands(0);

  double limit = 1.0;
  for (double v : a) limit = std::max(limit, std::abs(v));
  limit *= opts.blowup_threshold;

  std::size_t done = 0;  // nodes [0, done] are final
  std::size_t window = static_cast<std::size_t>(std::max(opts.picard_window, 4));
  while (done + 1 < nodes) {
    const std::size_t hi = std::min(nodes - 1, done + window);
    // constant extrapolation as the starting iterate
    for (std::size_t i = done + 1; i <= hi; ++i) {
      for (int l = 0; l < levels; ++l) w[l][i] = w[l][done];
      refresh_integrands(i);
    }
    bool converged = false;
    for (int sweep = 0; sweep < opts.picard_max_sweeps; ++sweep) {
      double update = 0.0, wmax = 0.0;
      for (int l = 0; l < levels; ++l) {
        for (std::size_t i = done; i < hi; ++i) {
          mom_a[l][i + 1] = mom_a[l][i] + detail::panel_integral(r, nxt[l], i, 0, hi, 1);
          mom_b[l][i + 1] = mom_b[l][i] + detail::panel_integral(r, nxt[l], i, 0, hi, n - 1);
        }
      }
      for (std::size_t i = done + 1; i <= hi; ++i) {
        const double inv = std::pow(r[i], 2 - n);
        for (int l = 0; l < levels; ++l) {
          const double next_w = a[l] - (mom_a[l][i] - inv * mom_b[l][i]) / nm2;
          update = std::max(update, std::abs(next_w - w[l][i]));
          wmax = std::max(wmax, std::abs(next_w));
          w[l][i] = next_w;
          dw[l][i] = -mom_b[l][i] * inv / r[i];
        }
        refresh_integrands(i);
      }
      if (!std::isfinite(update) || wmax > limit)
        throw Overflow(r[hi], "Picard iterate blew up before r = " + std::to_string(r[hi]));
      if (update <= opts.abs_tol + opts.rel_tol * wmax) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      window /= 2;
      if (window < static_cast<std::size_t>(opts.picard_min_window))
        throw NoContraction("Picard iteration does not contract beyond r = " + std::to_string(r[done]));
      continue;
    }
    done = hi;
  }
  return prof;
}

double residual(const ProblemSpec& spec, const StackProfile& profile) {
  const int levels = spec.stack_size();
  const int n = spec.dimension;
  const std::vector<double>& r = profile.grid.nodes();
  const std::size_t nodes = r.size();
  std::vector<double> head(levels);
  std::vector<std::vector<double>> integrand(levels, std::vector<double>(nodes));
  for (std::size_t i = 0; i < nodes; ++i) {
    for (int l = 0; l < levels; ++l) head[l] = profile.values[l][i];
    int l = 0;
    for (int j = 0; j < spec.m(); ++j)
      for (int k = 0; k < spec.alphas[j]; ++k, ++l) {
        const double next = (k + 1 < spec.alphas[j]) ? head[l + 1] : tail_forcing(spec, j, r[i], head);
        integrand[l][i] = next;
      }
  }
  double worst = 0.0;
  for (int l = 0; l < levels; ++l) {
    const auto moment = detail::cumulative_integral(r, integrand[l], n - 1);
    double scale = 0.0, defect = 0.0;
    for (std::size_t i = 0; i < nodes; ++i) {
      const double flux = std::pow(r[i], n - 1) * profile.dvalues[l][i];
      scale = std::max(scale, std::abs(flux) + std::abs(moment[i]));
      defect = std::max(defect, std::abs(flux + moment[i]));
    }
    if (scale > 0.0) worst = std::max(worst, defect / scale);
  }
  return worst;
}

}  // namespace polyshoot
