#pragma once

#include <vector>

#include "json.hpp"
#include "polyshoot/model.hpp"

namespace polyshoot::exponents {

/// Left-hand side of the cyclic Serrin condition for shift l (1-based):
///   N + 2 sum_{k=1}^m alpha_{k+l} prod_{j=0}^{k-1} p_{j+l} - N prod_j p_j,
/// indices taken cyclically.
double serrin_lhs(const ProblemSpec& spec, int l);

/// True iff serrin_lhs(spec, l) >= 0 for some l.
bool serrin_exists(const ProblemSpec& spec);

/// (N + 2 alpha) / (N - 2 alpha). Throws DimensionTooSmall when N <= 2 alpha.
double critical_exponent(int dimension, int alpha);

/// Exponents s_i making lambda^{s_i} u_i(lambda r) a solution family:
/// s_1 in closed form, s_{i+1} = (s_i + 2 alpha_i) / p_i.
std::vector<double> scaling_exponents(const ProblemSpec& spec);

/// Blow-up exponents sigma_j: sigma_1 in closed form, then the backward
/// recursion sigma_j = -2 alpha_j + p_j sigma_{j+1} closed cyclically
/// (sigma_{m+1} = sigma_1).
std::vector<double> blowup_exponents(const ProblemSpec& spec);

struct ThetaReport {
  std::vector<double> a;      ///< a_0 .. a_m
  std::vector<double> theta;  ///< theta_1 .. theta_m
  /// strict[j] for j >= 1 (0-based chain index): theta_j p_j > theta_{j-1}.
  std::vector<bool> strict;
  /// Cyclic closure theta_1 p_1 > theta_m (not part of the j >= 2 checks).
  bool cyclic_strict = false;
};

/// a_j = 1 + j (prod p - 1); theta_1 = 1, theta_j = a_{j-1} / prod_{k=2}^j p_k.
/// When `perturb_last` > 0, theta_m is multiplied by (1 - perturb_last).
ThetaReport theta_exponents(const ProblemSpec& spec, double perturb_last = 0.0);

enum class Class { Subcritical, Critical, Supercritical, SerrinRegion, OutsideSerrin };

const char* to_string(Class c);

/// m = 1: compares p with the critical exponent at tolerance 1e-12.
/// m > 1: SerrinRegion when serrin_exists, else OutsideSerrin.
Class classify(const ProblemSpec& spec);

struct ExponentReport {
  std::vector<double> serrin_lhs;
  bool serrin_ok = false;
  std::vector<double> critical;
  std::vector<double> scaling_s;
  std::vector<double> blowup_sigma;
  ThetaReport theta;
  Class classification = Class::Subcritical;
  bool identities_ok = false;
  double max_identity_defect = 0.0;
};

/// Computes every exponent quantity; scaling and theta entries are left empty
/// when prod p = 1.
ExponentReport report(const ProblemSpec& spec);

nlohmann::json to_json(const ExponentReport& rep);

}  // namespace polyshoot::exponents
