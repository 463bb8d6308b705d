#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "polyshoot/errors.hpp"
#include "polyshoot/exponents.hpp"
#include "polyshoot/integrator.hpp"

using namespace polyshoot;

namespace {

ProblemSpec single(int alpha, int N, double p) {
  ProblemSpec s;
  s.alphas = {alpha};
  s.exponents = {p};
  s.dimension = N;
  return s;
}

ProblemSpec linear(int alpha, int N, double c) {
  ProblemSpec s = single(alpha, N, 1.0);
  s.linear_rhs = {[c](double) { return c; }};
  return s;
}

double sup_diff(const StackProfile& a, const StackProfile& b) {
  double d = 0.0;
  for (std::size_t l = 0; l < a.values.size(); ++l)
    for (std::size_t i = 0; i < a.values[l].size(); ++i) d = std::max(d, std::abs(a.values[l][i] - b.values[l][i]));
  return d;
}

}  // namespace

TEST_CASE("rhs of the zero state") {
  auto spec = single(3, 8, 2);
  IvpState y(6, 0.0);
  auto d = rhs(spec, 0.5, y);
  for (double v : d) CHECK(v == 0.0);
}

TEST_CASE("rhs of -Delta u = u^3 at r = 1") {
  auto spec = single(1, 3, 3);
  auto d = rhs(spec, 1.0, IvpState{1.0, 0.0});
  CHECK(d[0] == 0.0);
  CHECK(d[1] == doctest::Approx(-1.0));
}

TEST_CASE("rhs of the delia system couples the chain tails") {
  auto spec = build_problem("delia", {{"N", 10}, {"p", 2}, {"q", 3}});
  // state: (u, u'), (-Delta u, .), (v, v')
  IvpState y{0.0, 0.0, 0.0, 0.0, 2.0, 0.0};
  auto d = rhs(spec, 1.0, y);
  CHECK(d[3] == doctest::Approx(-8.0));  // tail of chain 1: -|v|^q
  CHECK(d[5] == doctest::Approx(0.0));   // tail of chain 2: -|u|^p with u = 0
  y = {3.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  d = rhs(spec, 1.0, y);
  CHECK(d[3] == doctest::Approx(0.0));
  CHECK(d[5] == doctest::Approx(-9.0));
  CHECK(tail_forcing(spec, 1, 1.0, std::vector<double>{3.0, 0.0, 0.0}) == doctest::Approx(9.0));
}

TEST_CASE("series start") {
  auto spec = single(1, 3, 3);
  auto z = series_start(spec, std::vector<double>{0.0}, 1e-3);
  CHECK(z[0] == 0.0);
  CHECK(z[1] == 0.0);
  auto y = series_start(spec, std::vector<double>{1.0}, 1e-3);
  CHECK(y[0] == doctest::Approx(1.0 - 1e-6 / 6).epsilon(1e-15));
  CHECK(y[1] == doctest::Approx(-1e-3 / 3).epsilon(1e-12));
  auto bi = single(2, 6, 2);
  std::vector<double> a{2.0, 5.0};
  const double r0 = 1e-4;
  auto w = series_start(bi, a, r0);
  CHECK(w[2] == doctest::Approx(5.0 - r0 * r0 * 4.0 / 12.0).epsilon(1e-15));
  CHECK(w[0] == doctest::Approx(2.0 - r0 * r0 * 5.0 / 12.0).epsilon(1e-15));
}

TEST_CASE("series start rejects a large radius") {
  auto spec = single(2, 6, 2);
  CHECK_THROWS_AS(series_start(spec, std::vector<double>{1.0, 100.0}, 0.5), SeriesRadiusTooLarge);
  double r = safe_series_radius(spec, std::vector<double>{1.0, 100.0}, {});
  CHECK(r > 0.0);
  CHECK_NOTHROW(series_start(spec, std::vector<double>{1.0, 100.0}, r));
}

TEST_CASE("integrate: -Delta u = 2N gives 1 - r^2") {
  const int N = 4;
  auto spec = linear(1, N, 2.0 * N);
  auto p = integrate(spec, std::vector<double>{1.0}, 1.0);
  for (std::size_t i = 0; i < p.grid.size(); ++i) {
    double r = p.grid[i];
    CHECK(std::abs(p.values[0][i] - (1 - r * r)) < 1e-11);
    CHECK(std::abs(p.dvalues[0][i] + 2 * r) < 1e-11);
  }
}

TEST_CASE("integrate: zero data") {
  auto p = integrate(single(2, 6, 2), std::vector<double>{0.0, 0.0}, 1.0);
  for (const auto& lv : p.values)
    for (double v : lv) CHECK(v == 0.0);
}

TEST_CASE("integrate: blow-up radius decreases in a_1") {
  auto spec = single(2, 6, 2);
  double prev = 1e300;
  for (double a1 : {-40.0, -60.0, -90.0, -140.0}) {
    // negative a_1 makes Delta u positive and u grow until it blows up
    std::vector<double> a{1.0, a1};
    double radius = -1.0;
    try {
      integrate_endpoint(spec, a, 10.0);
    } catch (const Overflow& e) {
      radius = e.radius();
    }
    CAPTURE(a1);
    REQUIRE(radius > 0.0);
    CHECK(radius < prev);
    prev = radius;
  }
}

TEST_CASE("integrate: blow-up radius brackets agree with Picard") {
  auto spec = single(2, 6, 2);
  std::vector<double> a{1.0, -60.0};
  double radius = -1.0;
  try {
    integrate_endpoint(spec, a, 10.0);
  } catch (const Overflow& e) {
    radius = e.radius();
  }
  REQUIRE(radius > 0.0);
  IntegratorOptions po;
  po.method = IvpMethod::Picard;
  auto before = integrate(spec, a, 0.8 * radius, po);
  auto ref = integrate(spec, a, 0.8 * radius);
  CHECK(sup_diff(before, ref) <= 1e-6 * ref.scale());
}

TEST_CASE("Picard: constant forcing") {
  auto spec = linear(1, 3, 6.0);
  IntegratorOptions po;
  po.method = IvpMethod::Picard;
  auto p = picard_solve(spec, std::vector<double>{1.0}, 1.0, po);
  for (std::size_t i = 0; i < p.grid.size(); ++i) {
    double r = p.grid[i];
    CHECK(std::abs(p.values[0][i] - (1 - r * r)) < 1e-13);
  }
  auto z = picard_solve(single(1, 3, 3), std::vector<double>{0.0}, 1.0, po);
  for (double v : z.values[0]) CHECK(v == 0.0);
}

TEST_CASE("Picard and the stepper agree on alpha = 3") {
  auto spec = single(3, 8, 2);
  std::vector<double> a{1.0, 1.0, 1.0};
  IntegratorOptions po;
  po.method = IvpMethod::Picard;
  auto p = integrate(spec, a, 0.5, po);
  auto s = integrate(spec, a, 0.5);
  CHECK(sup_diff(p, s) <= 1e-8);
}

TEST_CASE("Picard and the stepper agree on random instances") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  IntegratorOptions po;
  po.method = IvpMethod::Picard;
  for (int i = 0; i < 20; ++i) {
    ProblemSpec spec;
    int m = 1 + static_cast<int>(rng() % 2);
    for (int j = 0; j < m; ++j) {
      spec.alphas.push_back(1 + static_cast<int>(rng() % 3));
      spec.exponents.push_back(1.5 + 2 * u01(rng));
    }
    spec.dimension = 2 * spec.max_alpha() + 1 + static_cast<int>(rng() % 4);
    std::vector<double> a;
    for (int l = 0; l < spec.stack_size(); ++l) a.push_back(0.2 + u01(rng));
    double r_end = 0.3 + 0.7 * u01(rng);
    auto s = integrate(spec, a, r_end);
    auto p = integrate(spec, a, r_end, po);
    CAPTURE(i);
    CHECK(sup_diff(p, s) <= 1e-8);
  }
}

TEST_CASE("residual of exact and perturbed profiles") {
  auto spec = linear(2, 6, oracle::manufactured_rhs(2, 6));
  // exact (1 - r^2)^2 stack
  StackProfile p;
  p.spec = spec;
  p.grid = RadialGrid::uniform(1.0, 4096);
  oracle::Poly lv = oracle::bump(2);
  for (int k = 0; k < 2; ++k) {
    auto d = lv.derivative();
    std::vector<double> v, dv;
    for (double r : p.grid.nodes()) {
      v.push_back(lv(r));
      dv.push_back(d(r));
    }
    p.values.push_back(v);
    p.dvalues.push_back(dv);
    lv = oracle::radial_laplacian(lv, 6);
    for (double& c : lv.c) c = -c;
  }
  CHECK(residual(spec, p) <= 1e-8);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> noise(-1e-3, 1e-3);
  auto q = p;
  for (auto& v : q.values)
    for (double& x : v) x += noise(rng) * p.scale();
  for (auto& v : q.dvalues)
    for (double& x : v) x += noise(rng) * p.scale();
  CHECK(residual(spec, q) > 1e-4);
}

TEST_CASE("residual of an integrated profile") {
  IntegratorOptions o;
  o.rel_tol = 1e-10;
  o.abs_tol = 1e-12;
  auto spec = single(2, 6, 2);
  auto p = integrate(spec, std::vector<double>{1.0, 20.0}, 1.0, o);
  CHECK(residual(spec, p) <= 1e-8);
}

TEST_CASE("stepper error is proportional to the tolerance") {
  const int N = 6;
  auto spec = linear(2, N, oracle::manufactured_rhs(2, N));
  std::vector<double> a{1.0, 4.0 * N};
  auto err = [&](double tol) {
    IntegratorOptions o;
    o.rel_tol = tol;
    o.abs_tol = tol * 1e-2;
    auto p = integrate(spec, a, 1.0, o);
    auto u = oracle::bump(2);
    double e = 0.0;
    for (std::size_t i = 0; i < p.grid.size(); ++i) e = std::max(e, std::abs(p.values[0][i] - u(p.grid[i])));
    return e;
  };
  double e1 = err(1e-6), e2 = err(1e-6 / 32);
  MESSAGE("error ratio " << e1 / e2);
  CHECK(e1 / e2 > 32.0 / 4);
  CHECK(e1 / e2 < 32.0 * 4);
}

TEST_CASE("continuous dependence on the initial stack") {
  for (const char* name : {"gnn", "biharmonic", "dirichlet-poly"}) {
    auto spec = build_problem(name, {{"N", 8}, {"p", 2}, {"alpha", 3}});
    std::vector<double> a(static_cast<std::size_t>(spec.stack_size()), 1.0);
    auto base = integrate(spec, a, 1.0);
    for (int k = 0; k < spec.stack_size(); ++k) {
      double d[3];
      for (int t = 0; t < 3; ++t) {
        auto b = a;
        b[static_cast<std::size_t>(k)] += 1e-8 * (1 << t);
        d[t] = sup_diff(integrate(spec, b, 1.0), base);
      }
      CAPTURE(name);
      CAPTURE(k);
      CHECK(d[0] / 1e-8 < 1e4);
      // Lipschitz: doubling delta doubles the difference
      CHECK(d[1] / d[0] == doctest::Approx(2.0).epsilon(0.05));
      CHECK(d[2] / d[1] == doctest::Approx(2.0).epsilon(0.05));
    }
  }
}

TEST_CASE("scaling family") {
  auto spec = single(3, 8, 2);
  std::vector<double> a{1.0, 2.0, 3.0};
  const double lambda = 1.7;
  auto base = integrate(spec, a, 1.0);
  auto scaled = rescale(base, lambda);
  const double s = exponents::scaling_exponents(spec)[0];
  std::vector<double> b(3);
  for (int k = 0; k < 3; ++k) b[k] = std::pow(lambda, s + 2 * k) * a[k];
  IntegratorOptions o;
  o.grid_intervals = kDefaultGridIntervals;
  auto direct = integrate(spec, b, 1.0 / lambda, o);
  CHECK(sup_diff(direct, scaled) <= 1e-9 * direct.scale());
}
