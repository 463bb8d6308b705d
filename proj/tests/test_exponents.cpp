#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "polyshoot/errors.hpp"
#include "polyshoot/exponents.hpp"

using namespace polyshoot;
using namespace polyshoot::exponents;

namespace {

ProblemSpec single(int alpha, int N, double p) {
  ProblemSpec s;
  s.alphas = {alpha};
  s.exponents = {p};
  s.dimension = N;
  return s;
}

ProblemSpec system(std::vector<int> alphas, std::vector<double> ps, int N) {
  ProblemSpec s;
  s.alphas = std::move(alphas);
  s.exponents = std::move(ps);
  s.dimension = N;
  return s;
}

ProblemSpec random_spec(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> m_dist(1, 4), a_dist(1, 4);
  std::uniform_real_distribution<double> p_dist(1.1, 4.0);
  ProblemSpec s;
  int m = m_dist(rng);
  for (int j = 0; j < m; ++j) {
    s.alphas.push_back(a_dist(rng));
    s.exponents.push_back(p_dist(rng));
  }
  s.dimension = 2 * s.max_alpha() + 1 + static_cast<int>(rng() % 10);
  return s;
}

}  // namespace

TEST_CASE("serrin lhs at the m = 1 boundary") {
  CHECK(serrin_lhs(single(2, 10, 5.0 / 3.0), 1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("serrin lhs for delia matches the m = 2 curve") {
  // 2 beta q + N + 2 alpha p q - N p q with alpha = 2, beta = 1
  const double p = 1.7, q = 2.3, N = 9;
  auto s = system({2, 1}, {q, p}, 9);
  double curve = 2 * 1 * q + N + 2 * 2 * p * q - N * p * q;
  double a = serrin_lhs(s, 1), b = serrin_lhs(s, 2);
  CHECK((std::abs(a - curve) < 1e-12 || std::abs(b - curve) < 1e-12));
}

TEST_CASE("serrin lhs with p = 1") { CHECK(serrin_lhs(single(1, 3, 1.0), 1) == doctest::Approx(2.0)); }

TEST_CASE("serrin existence") {
  CHECK(serrin_lhs(single(2, 10, 1.5), 1) == doctest::Approx(1.0));
  CHECK(serrin_exists(single(2, 10, 1.5)));
  CHECK(serrin_lhs(single(2, 10, 2.0), 1) == doctest::Approx(-2.0));
  CHECK_FALSE(serrin_exists(single(2, 10, 2.0)));
  auto h = system({1, 1}, {2, 2}, 10);
  CHECK(serrin_lhs(h, 1) == doctest::Approx(-18.0));
  CHECK(serrin_lhs(h, 2) == doctest::Approx(-18.0));
  CHECK_FALSE(serrin_exists(h));
}

TEST_CASE("critical exponent") {
  CHECK(critical_exponent(3, 1) == doctest::Approx(5.0));
  CHECK(critical_exponent(10, 2) == doctest::Approx(14.0 / 6.0));
  for (int a = 1; a <= 6; ++a) CHECK(critical_exponent(2 * a + 1, a) == doctest::Approx(4.0 * a + 1));
  CHECK_THROWS_AS(critical_exponent(4, 2), DimensionTooSmall);
}

TEST_CASE("scaling exponents") {
  CHECK(scaling_exponents(single(3, 8, 2.0))[0] == doctest::Approx(6.0));
  CHECK(scaling_exponents(single(1, 3, 3.0))[0] == doctest::Approx(1.0));
  auto s = scaling_exponents(system({2, 1}, {3, 3}, 10));
  // s = (2 beta q + 2 alpha)/(pq - 1), t = (2 alpha p + 2 beta)/(pq - 1) with p = q = 3
  REQUIRE(s.size() == 2);
  CHECK(s[0] == doctest::Approx((2.0 * 1 * 3 + 2 * 2) / 8.0));
  CHECK(s[1] == doctest::Approx((2.0 * 2 * 3 + 2 * 1) / 8.0));
  CHECK(s[0] == doctest::Approx(1.25));
  CHECK(s[1] == doctest::Approx(1.75));
}

TEST_CASE("scaling exponents are undefined when prod p = 1") {
  CHECK_THROWS_AS(scaling_exponents(system({1, 1}, {1, 1}, 3)), DegenerateScaling);
  CHECK_THROWS_AS(blowup_exponents(system({1, 1}, {2, 0.5}, 3)), DegenerateScaling);
}

TEST_CASE("blow-up exponents") {
  auto sig = blowup_exponents(system({2, 1}, {3, 3}, 10));
  CHECK(sig[0] == doctest::Approx(1.25));
  CHECK(sig[1] == doctest::Approx(1.75));
  CHECK(blowup_exponents(single(2, 10, 3.0))[0] == doctest::Approx(2.0));
}

TEST_CASE("theta exponents") {
  auto t = theta_exponents(system({1, 1}, {2, 2}, 10));
  CHECK(t.a == std::vector<double>{1, 4, 7});
  CHECK(t.theta[0] == doctest::Approx(1.0));
  CHECK(t.theta[1] == doctest::Approx(2.0));
  CHECK(t.strict[1]);
  CHECK(theta_exponents(single(1, 3, 2.0)).theta == std::vector<double>{1.0});
  auto t3 = theta_exponents(system({1, 1, 1}, {2, 2, 2}, 10));
  CHECK(t3.a == std::vector<double>{1, 8, 15, 22});
  CHECK(t3.theta[1] == doctest::Approx(4.0));
  CHECK(t3.theta[2] == doctest::Approx(15.0 / 4.0));
  CHECK(t3.strict[1]);
  CHECK(t3.strict[2]);
}

TEST_CASE("theta cyclic closure and perturbation") {
  auto t = theta_exponents(system({1, 1}, {2, 2}, 10));
  // theta_1 p_1 = 2 = theta_2: equality, not strict
  CHECK_FALSE(t.cyclic_strict);
  auto tp = theta_exponents(system({1, 1}, {2, 2}, 10), 1e-6);
  CHECK(tp.cyclic_strict);
}

TEST_CASE("classification") {
  CHECK(classify(single(2, 10, 2.0)) == Class::Subcritical);
  CHECK(classify(single(2, 10, 14.0 / 6.0)) == Class::Critical);
  CHECK(classify(single(2, 10, 3.0)) == Class::Supercritical);
  CHECK(classify(system({1, 1}, {2, 2}, 10)) == Class::OutsideSerrin);
  CHECK(classify(system({1, 1}, {1.2, 1.2}, 4)) == Class::SerrinRegion);
}

TEST_CASE("random specs: recursions and identities") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    auto spec = random_spec(rng);
    auto s = scaling_exponents(spec);
    auto sig = blowup_exponents(spec);
    const int m = spec.m();
    for (int k = 0; k < m; ++k) {
      const double next = s[(k + 1) % m];
      const double lhs = s[k] + 2 * spec.alphas[k];
      CHECK(std::abs(lhs - spec.exponents[k] * next) <= 1e-12 * std::max(1.0, std::abs(lhs)));
      CHECK(std::abs(sig[k] - s[k]) <= 1e-12 * std::max(1.0, std::abs(s[k])));
      const double back = -2 * spec.alphas[k] + spec.exponents[k] * sig[(k + 1) % m];
      CHECK(std::abs(back - sig[k]) <= 1e-12 * std::max(1.0, std::abs(sig[k])));
    }
    auto rep = report(spec);
    CHECK(rep.identities_ok);
  }
}

TEST_CASE("m = 1 Serrin boundary") {
  for (int alpha = 1; alpha <= 14; ++alpha)
    for (int N = 2 * alpha + 1; N <= 30; ++N) {
      const double p = static_cast<double>(N) / (N - 2 * alpha);
      CHECK(std::abs(serrin_lhs(single(alpha, N, p), 1)) <= 1e-12 * N);
      CHECK(std::abs(serrin_lhs(single(alpha, N, p * (1 + 1e-6)), 1)) > 1e-12 * N);
    }
}

TEST_CASE("serrin lhs is affine in each exponent") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20; ++i) {
    auto spec = random_spec(rng);
    for (int j = 0; j < spec.m(); ++j)
      for (int l = 1; l <= spec.m(); ++l) {
        auto at = [&](double p) {
          auto s = spec;
          s.exponents[j] = p;
          return serrin_lhs(s, l);
        };
        double f1 = at(1.5), f2 = at(2.5), f3 = at(3.5);
        CHECK(std::abs((f3 - f2) - (f2 - f1)) <= 1e-9 * std::max(1.0, std::abs(f3)));
      }
  }
}

TEST_CASE("report JSON") {
  auto j = to_json(report(single(2, 10, 2.0)));
  CHECK(j.at("classification") == "subcritical");
  CHECK(j.at("serrin_lhs").size() == 1);
  CHECK(j.at("identities_ok") == true);
}
