// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "polyshoot/analysis.hpp"
#include "polyshoot/compat.hpp"
#include "polyshoot/errors.hpp"
#include "polyshoot/exponents.hpp"
#include "polyshoot/integrator.hpp"
#include "polyshoot/shooting.hpp"

using namespace polyshoot;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double sup_diff(const StackProfile& a, const StackProfile& b) {
  double d = 0.0;
  for (std::size_t l = 0; l < a.values.size(); ++l)
    for (std::size_t i = 0; i < a.values[l].size(); ++i) d = std::max(d, std::abs(a.values[l][i] - b.values[l][i]));
  return d;
}

ProblemSpec dirichlet(int alpha, int N, double p) {
  return build_problem("dirichlet-poly", {{"alpha", double(alpha)}, {"N", double(N)}, {"p", p}});
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// criterion 3 results, reused by 4 and 5
struct Desk {
  int alpha, N;
  double p;
  MultistartResult result;
  std::size_t clusters = 0;
};
std::vector<Desk> desk;

Outcome manufactured() {
  Outcome o{true, ""};
  for (int alpha = 1; alpha <= 4; ++alpha) {
    const int N = 2 * alpha + 2;
    ProblemSpec s;
    s.alphas = {alpha};
    s.exponents = {1.0};
    s.dimension = N;
    const double c = oracle::manufactured_rhs(alpha, N);
    s.linear_rhs = {[c](double) { return c; }};
    auto t0 = Clock::now();
    auto rec = solve_bvp(s, default_unknowns(s));
    const double secs = seconds_since(t0);
    auto u = oracle::bump(alpha);
    double err = 0.0;
    for (std::size_t i = 0; i < rec.profile.grid.size(); ++i)
      err = std::max(err, std::abs(rec.profile.values[0][i] - u(rec.profile.grid[i])));
    o.pass = o.pass && err <= 1e-8 && secs < 2.0;
    o.detail += fmt("a=%d err=%.1e t=%.2fs; ", alpha, err, secs);
  }
  return o;
}

Outcome picard_vs_stepper() {
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  IntegratorOptions po;
  po.method = IvpMethod::Picard;
  double worst = 0.0;
  auto t0 = Clock::now();
  for (int i = 0; i < 50; ++i) {
    ProblemSpec spec;
    const int m = 1 + static_cast<int>(rng() % 3);
    for (int j = 0; j < m; ++j) {
      spec.alphas.push_back(1 + static_cast<int>(rng() % 4));
      spec.exponents.push_back(1.2 + 2.8 * u01(rng));
    }
    spec.dimension = 2 * spec.max_alpha() + 1 + static_cast<int>(rng() % 5);
    std::vector<double> a;
    for (int l = 0; l < spec.stack_size(); ++l) a.push_back(0.1 + 1.2 * u01(rng));
    const double r_end = 0.2 + 0.8 * u01(rng);
    worst = std::max(worst, sup_diff(integrate(spec, a, r_end), integrate(spec, a, r_end, po)));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-8 && secs < 60.0, fmt("50 draws, worst sup-diff %.1e, t=%.1fs", worst, secs)};
}

Outcome desk_uniqueness() {
  auto t0 = Clock::now();
  Outcome o{true, ""};
  for (auto [alpha, N, p] : {std::tuple{1, 3, 3.0}, {2, 6, 2.0}, {3, 8, 2.0}, {4, 10, 2.0}}) {
    Desk d{alpha, N, p, {}, 0};
    ShootOptions opts;
    opts.multistart_count = 20;
    d.result = multistart(dirichlet(alpha, N, p), opts);
    d.clusters = cluster_solutions(d.result.records, 1e-6).size();
    o.pass = o.pass && d.result.records.size() >= 10 && d.clusters == 1;
    o.detail += fmt("(%d,%d,%g): %zu/20 conv, %zu cluster; ", alpha, N, p, d.result.records.size(), d.clusters);
    desk.push_back(std::move(d));
  }
  const double secs = seconds_since(t0);
  o.pass = o.pass && secs < 300.0;
  o.detail += fmt("t=%.1fs", secs);
  return o;
}

Outcome hopf() {
  int checked = 0, failed = 0;
  double worst = INFINITY;
  for (const auto& d : desk)
    for (const auto& rec : d.result.records) {
      auto h = analysis::hopf_check(rec);
      ++checked;
      if (!h.pass || !(std::abs(h.value) > h.margin)) ++failed;
      worst = std::min(worst, std::abs(h.value) / std::max(h.margin, 1e-300));
    }
  return {checked > 0 && failed == 0, fmt("%d solutions, %d failed, min |value|/margin %.2e", checked, failed, worst)};
}

Outcome monotonicity() {
  int checked = 0;
  std::string detail;
  for (const auto& d : desk) {
    int failed = 0, not_decreasing = 0;
    double worst = 0.0;
    for (const auto& rec : d.result.records) {
      ++checked;
      auto m = analysis::monotonicity_check(rec, 0, 1e-10);
      if (m.pass()) continue;
      ++failed;
      if (!m.decreasing) ++not_decreasing;
      worst = std::min(worst, m.worst_value);
    }
    if (failed)
      detail += fmt("a=%d: %d failed (%d not decreasing), min u/sup %.1e; ", d.alpha, failed, not_decreasing, worst);
  }
  const bool ok = checked > 0 && detail.empty();
  return {ok, fmt("%d solutions; ", checked) + (ok ? std::string("all pass") : detail)};
}

Outcome shape() {
  Outcome o{true, ""};
  for (auto [alpha, N] : {std::pair{3, 8}, {4, 10}}) {
    auto rec = solve_bvp(dirichlet(alpha, N, 2), default_unknowns(dirichlet(alpha, N, 2)));
    auto r = analysis::shape_report(rec);
    bool exact = r.pass;
    for (const auto& l : r.levels) exact = exact && l.zeros_ok && l.critical_ok && l.signs_ok;
    o.pass = o.pass && exact;
    o.detail += fmt("a=%d %s; ", alpha, exact ? "exact" : "mismatch");
  }
  auto s6 = dirichlet(6, 14, 2);
  auto r6 = analysis::shape_report(solve_bvp(s6, default_unknowns(s6)));
  std::vector<int> got;
  std::string counts;
  for (const auto& l : r6.levels) {
    got.push_back(l.zeros_inclusive);
    counts += std::to_string(l.zeros_inclusive);
  }
  const bool six = got == std::vector<int>{1, 2, 3, 3, 2};
  o.pass = o.pass && six;
  o.detail += "a=6 counts " + counts;
  return o;
}

Outcome scaling() {
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> p_dist(1.1, 4.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    ProblemSpec s;
    const int m = 1 + static_cast<int>(rng() % 4);
    for (int j = 0; j < m; ++j) {
      s.alphas.push_back(1 + static_cast<int>(rng() % 4));
      s.exponents.push_back(p_dist(rng));
    }
    s.dimension = 2 * s.max_alpha() + 1 + static_cast<int>(rng() % 10);
    auto sv = exponents::scaling_exponents(s);
    auto sig = exponents::blowup_exponents(s);
    for (int k = 0; k < m; ++k) {
      const double lhs = sv[k] + 2 * s.alphas[k];
      worst = std::max(worst, std::abs(lhs - s.exponents[k] * sv[(k + 1) % m]) / std::max(1.0, std::abs(lhs)));
      worst = std::max(worst, std::abs(sig[k] - sv[k]) / std::max(1.0, std::abs(sv[k])));
    }
  }
  double serrin = 0.0;
  for (int alpha = 1; alpha <= 10; ++alpha)
    for (int N = 2 * alpha + 1; N <= 2 * alpha + 12; ++N) {
      ProblemSpec s;
      s.alphas = {alpha};
      s.exponents = {static_cast<double>(N) / (N - 2 * alpha)};
      s.dimension = N;
      serrin = std::max(serrin, std::abs(exponents::serrin_lhs(s, 1)) / N);
    }
  auto spec = dirichlet(2, 6, 2);
  auto rec = solve_bvp(spec, default_unknowns(spec));
  const double defect = residual(spec, rescale(rec.profile, 2.0));
  return {worst <= 1e-12 && serrin <= 1e-12 && defect <= 1e-6,
          fmt("identities %.1e, m=1 boundary %.1e, lambda=2 defect %.1e", worst, serrin, defect)};
}

Outcome complementing() {
  using compat::Complex;
  using compat::CPoly;
  auto c = [](int re, int im) { return Complex(compat::Rational(re), compat::Rational(im)); };
  std::vector<CPoly> expect{CPoly({c(1, 0)}), CPoly({c(0, 0), c(1, 0)}),
                            CPoly({c(0, 0), c(0, -4), c(6, 0), c(0, 4)}),
                            CPoly({c(0, -4), c(16, 0), c(0, 20), c(-10, 0)})};
  auto rep = compat::complementing_check(BoundaryKind::Natural, 4);
  const bool ok = rep.remainders == expect && rep.rank == 4;
  std::string text;
  for (const auto& r : rep.remainders) text += compat::to_pretty(r) + "; ";
  return {ok, text + fmt("rank %d", rep.rank)};
}

Outcome navier() {
  auto s = build_problem("navier-poly", {{"N", 6}, {"alpha", 2}, {"p", 2}});
  auto direct = solve_bvp(s, default_unknowns(s));
  auto dec = navier_decomposition_solve(s);
  const double d = sup_diff(direct.profile, dec.profile);
  return {d <= 1e-7, fmt("sup-diff %.1e", d)};
}

Outcome sign_tables() {
  auto spec = dirichlet(3, 8, 2);
  auto u = solve_bvp(spec, default_unknowns(spec));
  const double rel[] = {0.0, 1e-4, -1e-6};
  std::vector<double> delta;
  for (int k = 0; k < 3; ++k) delta.push_back(rel[k] * u.initial_stack[k]);
  auto t = analysis::sign_table(analysis::normalize_pair(u, analysis::perturbed_record(u, delta)));
  const std::vector<std::vector<int>> expect{{0, 1, 1},   {1, 1, 1},   {1, 1, 0},  {1, 1, -1},
                                             {1, 0, -1},  {1, -1, -1}, {0, -1, -1}, {-1, -1, -1}};
  auto got = t.transitions();
  const bool table = got.size() >= expect.size() && std::equal(expect.begin(), expect.end(), got.begin());

  const int n = 1000;
  std::vector<double> r;
  for (int i = 0; i <= n; ++i) r.push_back(static_cast<double>(i) / n);
  const double roots[] = {0.7, 0.3, 0.5, 0.123};
  std::vector<std::vector<double>> cols;
  for (double c : roots) {
    std::vector<double> v;
    for (double x : r) v.push_back(std::sin(3.0 * (x - c)) * (1.0 + x));
    cols.push_back(v);
  }
  auto syn = analysis::sign_table_from_columns(r, cols, {"a", "b", "c", "d"});
  double worst = syn.breakpoints.size() == 4 ? 0.0 : INFINITY;
  std::vector<double> sorted(std::begin(roots), std::end(roots));
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 0; k < syn.breakpoints.size() && k < 4; ++k)
    worst = std::max(worst, std::abs(syn.breakpoints[k] - sorted[k]) * n);
  return {table && worst <= 1.0,
          fmt("table pattern %s (%zu rows), synthetic breakpoint error %.2f cells", table ? "matches" : "differs",
              got.size(), worst)};
}

Outcome zero_count_instances() {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> log_eps(std::log(1e-8), std::log(1e-2));
  Outcome o{true, ""};
  for (int alpha = 2; alpha <= 4; ++alpha) {
    auto spec = dirichlet(alpha, 2 * alpha + 2, 2);
    auto u = solve_bvp(spec, default_unknowns(spec));
    int generated = 0, passed = 0, off_config = 0, degenerate = 0;
    for (int i = 0; i < 20; ++i) {
      std::vector<double> delta(alpha, 0.0);
      for (int k = 1; k < alpha; ++k) delta[k] = std::exp(log_eps(rng)) * u.initial_stack[k];
      auto t = analysis::sign_table(analysis::normalize_pair(u, analysis::perturbed_record(u, delta)));
      auto z = analysis::zero_count_lemma_check(t, alpha);
      ++generated;
      if (z.skipped) ++degenerate;
      else if (z.configuration != analysis::LemmaConfiguration::ZeroCount) ++off_config;
      else if (z.z >= z.n + 1) ++passed;
    }
    o.pass = o.pass && passed == generated;
    o.detail += fmt("a=%d %d/%d hold (%d off-config, %d degenerate); ", alpha, passed, generated, off_config, degenerate);
  }
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "manufactured solutions", manufactured},
      {2, "Picard vs stepper", picard_vs_stepper},
      {3, "desk-scale uniqueness", desk_uniqueness},
      {4, "Hopf sign", hopf},
      {5, "positivity and monotonicity", monotonicity},
      {6, "shape of Delta^s u", shape},
      {7, "scaling laws", scaling},
      {8, "complementing remainders", complementing},
      {9, "Navier decomposition", navier},
      {10, "sign-table engine", sign_tables},
      {11, "zero-count instances", zero_count_instances},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
