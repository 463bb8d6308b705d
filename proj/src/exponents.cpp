#include "polyshoot/exponents.hpp"

#include <algorithm>
#include <cmath>

#include "polyshoot/errors.hpp"

namespace polyshoot::exponents {

namespace {

// 1-based cyclic access.
template <class T>
T cyc(const std::vector<T>& v, int i) {
  const int m = static_cast<int>(v.size());
  return v[static_cast<std::size_t>(((i - 1) % m + m) % m)];
}

double closed_form_first(const ProblemSpec& spec) {
  const double prod = spec.exponent_product();
  if (std::abs(prod - 1.0) < 1e-15) throw DegenerateScaling("prod p_j = 1: scaling exponents undefined");
  double num = 0.0;
  double partial = 1.0;
  for (int j = 0; j < spec.m(); ++j) {
    num += spec.alphas[j] * partial;
    partial *= spec.exponents[j];
  }
  return 2.0 * num / (prod - 1.0);
}

}  // namespace

double serrin_lhs(const ProblemSpec& spec, int l) {
  const int m = spec.m();
  const double n = spec.dimension;
  double sum = 0.0;
  for (int k = 1; k <= m; ++k) {
    double prod = 1.0;
    for (int j = 0; j <= k - 1; ++j) prod *= cyc(spec.exponents, j + l);
    sum += cyc(spec.alphas, k + l) * prod;
  }
  return n + 2.0 * sum - n * spec.exponent_product();
}

bool serrin_exists(const ProblemSpec& spec) {
  for (int l = 1; l <= spec.m(); ++l)
    if (serrin_lhs(spec, l) >= 0.0) return true;
  return false;
}

double critical_exponent(int dimension, int alpha) {
  if (dimension <= 2 * alpha)
    throw DimensionTooSmall("critical exponent needs N > 2 alpha (N = " + std::to_string(dimension) +
                            ", alpha = " + std::to_string(alpha) + ")");
  return static_cast<double>(dimension + 2 * alpha) / static_cast<double>(dimension - 2 * alpha);
}

std::vector<double> scaling_exponents(const ProblemSpec& spec) {
  std::vector<double> s(spec.m());
  s[0] = closed_form_first(spec);
  for (int i = 0; i + 1 < spec.m(); ++i) s[i + 1] = (s[i] + 2.0 * spec.alphas[i]) / spec.exponents[i];
  return s;
}

std::vector<double> blowup_exponents(const ProblemSpec& spec) {
  const int m = spec.m();
  std::vector<double> sigma(m);
  sigma[0] = closed_form_first(spec);
  // walk backwards from the cyclic closure sigma_{m+1} = sigma_1
  double next = sigma[0];
  for (int j = m - 1; j >= 1; --j) {
    sigma[j] = -2.0 * spec.alphas[j] + spec.exponents[j] * next;
    next = sigma[j];
  }
  return sigma;
}

ThetaReport theta_exponents(const ProblemSpec& spec, double perturb_last) {
  const int m = spec.m();
  const double prod = spec.exponent_product();
  ThetaReport rep;
  rep.a.resize(m + 1);
  for (int j = 0; j <= m; ++j) rep.a[j] = 1.0 + j * (prod - 1.0);
  rep.theta.assign(m, 1.0);
  double denom = 1.0;
  for (int j = 2; j <= m; ++j) {
    denom *= spec.exponents[j - 1];
    rep.theta[j - 1] = rep.a[j - 1] / denom;
  }
  if (perturb_last > 0.0 && m >= 2) rep.theta[m - 1] *= (1.0 - perturb_last);
  rep.strict.assign(m, true);
  for (int j = 1; j < m; ++j) rep.strict[j] = rep.theta[j] * spec.exponents[j] > rep.theta[j - 1];
  rep.cyclic_strict = rep.theta[0] * spec.exponents[0] > rep.theta[m - 1];
  return rep;
}

const char* to_string(Class c) {
  switch (c) {
    case Class::Subcritical: return "subcritical";
    case Class::Critical: return "critical";
    case Class::Supercritical: return "supercritical";
    case Class::SerrinRegion: return "serrin-region";
    case Class::OutsideSerrin: return "outside-serrin";
  }
  return "?";
}

Class classify(const ProblemSpec& spec) {
  if (spec.m() > 1) return serrin_exists(spec) ? Class::SerrinRegion : Class::OutsideSerrin;
  const double crit = critical_exponent(spec.dimension, spec.alphas[0]);
  const double p = spec.exponents[0];
  if (std::abs(p - crit) <= 1e-12 * std::max(1.0, crit)) return Class::Critical;
  return p < crit ? Class::Subcritical : Class::Supercritical;
}

ExponentReport report(const ProblemSpec& spec) {
  ExponentReport rep;
  for (int l = 1; l <= spec.m(); ++l) rep.serrin_lhs.push_back(serrin_lhs(spec, l));
  rep.serrin_ok = serrin_exists(spec);
  for (int a : spec.alphas) rep.critical.push_back(critical_exponent(spec.dimension, a));
  rep.classification = classify(spec);
  rep.identities_ok = true;
  if (spec.exponent_product() > 1.0) {
    rep.scaling_s = scaling_exponents(spec);
    rep.blowup_sigma = blowup_exponents(spec);
    rep.theta = theta_exponents(spec);
    const int m = spec.m();
    for (int i = 0; i < m; ++i) {
      const double lhs = rep.scaling_s[i] + 2.0 * spec.alphas[i];
      const double rhs = spec.exponents[i] * rep.scaling_s[(i + 1) % m];
      const double d1 = std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
      const double d2 = std::abs(rep.scaling_s[i] - rep.blowup_sigma[i]) / std::max(1.0, std::abs(rep.scaling_s[i]));
      rep.max_identity_defect = std::max({rep.max_identity_defect, d1, d2});
    }
    rep.identities_ok = rep.max_identity_defect <= 1e-12;
  }
  return rep;
}

nlohmann::json to_json(const ExponentReport& rep) {
  nlohmann::json j;
  j["serrin_lhs"] = rep.serrin_lhs;
  j["serrin_ok"] = rep.serrin_ok;
  j["critical"] = rep.critical;
  j["scaling_s"] = rep.scaling_s;
  j["blowup_sigma"] = rep.blowup_sigma;
  j["theta"] = rep.theta.theta;
  j["aux_a"] = rep.theta.a;
  std::vector<bool> strict(rep.theta.strict.begin(), rep.theta.strict.end());
  j["theta_strict"] = strict;
  j["theta_cyclic_strict"] = rep.theta.cyclic_strict;
  j["classification"] = to_string(rep.classification);
  j["identities_ok"] = rep.identities_ok;
  j["max_identity_defect"] = rep.max_identity_defect;
  return j;
}

}  // namespace polyshoot::exponents
