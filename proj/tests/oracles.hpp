#pragma once

// Reference computations that share no code with the library.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

/// Polynomial in r, ascending coefficients.
struct Poly {
  std::vector<double> c;

  double operator()(double r) const {
    double v = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) v = v * r + c[k];
    return v;
  }
  Poly derivative() const {
    Poly d;
    for (std::size_t k = 1; k < c.size(); ++k) d.c.push_back(static_cast<double>(k) * c[k]);
    if (d.c.empty()) d.c.push_back(0.0);
    return d;
  }
  Poly operator*(const Poly& o) const {
    Poly p;
    p.c.assign(c.size() + o.c.size() - 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = 0; j < o.c.size(); ++j) p.c[i + j] += c[i] * o.c[j];
    return p;
  }
};

/// Radial Laplacian f'' + (N-1)/r f' term by term: r^k -> k(k+N-2) r^{k-2}.
/// Odd and k = 1 terms would be singular; callers pass even polynomials.
inline Poly radial_laplacian(const Poly& f, int N) {
  Poly out;
  out.c.assign(f.c.size() > 2 ? f.c.size() - 2 : 1, 0.0);
  for (std::size_t k = 2; k < f.c.size(); ++k)
    out.c[k - 2] += static_cast<double>(k) * static_cast<double>(k + N - 2) * f.c[k];
  return out;
}

/// (1 - r^2)^alpha
inline Poly bump(int alpha) {
  Poly p{{1.0}};
  for (int k = 0; k < alpha; ++k) p = p * Poly{{1.0, 0.0, -1.0}};
  return p;
}

/// (-Delta)^alpha (1 - r^2)^alpha by repeated application of the Laplacian.
inline double manufactured_rhs(int alpha, int N) {
  Poly p = bump(alpha);
  for (int k = 0; k < alpha; ++k) {
    p = radial_laplacian(p, N);
    for (double& x : p.c) x = -x;
  }
  return p(0.0);
}

/// Classical RK4 with a fixed step for u'' = -f(u) - (N-1)/r u', u(0) = a,
/// u'(0) = 0. The first four steps are replaced by the quadratic Taylor term
/// so the singular coefficient stays within the RK4 stability region.
/// Returns u(r_end).
inline double rk4_second_order(const std::function<double(double)>& f, int N, double a, double r_end,
                               int steps) {
  const double h = r_end / steps;
  double r = 4 * h;
  double u = a - r * r * f(a) / (2.0 * N);
  double v = -r * f(a) / N;
  auto acc = [&](double rr, double uu, double vv) { return -f(uu) - (N - 1) / rr * vv; };
  for (int i = 4; i < steps; ++i) {
    double k1u = v, k1v = acc(r, u, v);
    double k2u = v + 0.5 * h * k1v, k2v = acc(r + 0.5 * h, u + 0.5 * h * k1u, v + 0.5 * h * k1v);
    double k3u = v + 0.5 * h * k2v, k3v = acc(r + 0.5 * h, u + 0.5 * h * k2u, v + 0.5 * h * k2v);
    double k4u = v + h * k3v, k4v = acc(r + h, u + h * k3u, v + h * k3v);
    u += h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
    v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    r += h;
  }
  return u;
}

/// u(0) of the positive solution of -Delta u = |u|^p on the unit ball by
/// bisection on the map a -> u(1; a).
inline double gnn_origin_value(int N, double p, double lo, double hi, int steps = 20000) {
  auto f = [p](double u) { return std::pow(std::abs(u), p); };
  double flo = rk4_second_order(f, N, lo, 1.0, steps);
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = rk4_second_order(f, N, mid, 1.0, steps);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& g, double a, double b, int n = 2000) {
  const double h = (b - a) / n;
  double s = g(a) + g(b);
  for (int i = 1; i < n; ++i) s += g(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace oracle
