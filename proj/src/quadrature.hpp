#pragma once

// Product quadrature on sampled data: each panel [x_i, x_{i+1}] integrates
// s^q P(s), where P is the cubic through four neighbouring samples (shifted
// inward at the ends of the admissible range). The Gauss-Legendre rule is
// sized so that s^q P(s) is integrated exactly, which keeps the weighted
// moments accurate right down to the origin.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace polyshoot::detail {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

inline GaussRule make_gauss_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      const double pn = n == 0 ? 1.0 : p1;
      const double pnm1 = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

inline const GaussRule& gauss_rule(int n) {
  static const std::array<GaussRule, 41> rules = [] {
    std::array<GaussRule, 41> r;
    for (int k = 1; k <= 40; ++k) r[k] = make_gauss_rule(k);
    return r;
  }();
  return rules[std::clamp(n, 1, 40)];
}

/// int_{x_i}^{x_{i+1}} s^q P(s) ds with P the local cubic interpolant of f
/// using samples in [lo, hi].
inline double panel_integral(std::span<const double> x, std::span<const double> f, std::size_t i, std::size_t lo,
                             std::size_t hi, int q = 0) {
  std::size_t s0 = (i >= lo + 1) ? i - 1 : lo;
  if (s0 + 3 > hi) s0 = hi >= lo + 3 ? hi - 3 : lo;
  const std::size_t npts = std::min<std::size_t>(4, hi - lo + 1);
  const double a = x[i], b = x[i + 1];
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  const GaussRule& rule = gauss_rule((q + 5) / 2);
  double total = 0.0;
  for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
    const double t = mid + half * rule.nodes[g];
    double val = 0.0;
    for (std::size_t p = 0; p < npts; ++p) {
      double basis = 1.0;
      for (std::size_t k = 0; k < npts; ++k)
        if (k != p) basis *= (t - x[s0 + k]) / (x[s0 + p] - x[s0 + k]);
      val += basis * f[s0 + p];
    }
    total += rule.weights[g] * std::pow(t, q) * val;
  }
  return total * half;
}

/// Running integral F(x_i) = int_{x_0}^{x_i} s^q f(s) ds.
inline std::vector<double> cumulative_integral(std::span<const double> x, std::span<const double> f, int q = 0) {
  std::vector<double> out(x.size(), 0.0);
  if (x.size() < 2) return out;
  const std::size_t hi = x.size() - 1;
  for (std::size_t i = 0; i < hi; ++i) out[i + 1] = out[i] + panel_integral(x, f, i, 0, hi, q);
  return out;
}

}  // namespace polyshoot::detail
