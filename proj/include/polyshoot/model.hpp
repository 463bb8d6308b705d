#pragma once

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace polyshoot {

enum class BoundaryKind { Dirichlet, Navier, Natural };

std::string to_string(BoundaryKind bc);
BoundaryKind parse_boundary_kind(std::string_view name);

/// A radial function r -> f(r), used as a fixed right-hand side.
using RadialFunction = std::function<double(double)>;

/// Full description of a radial polyharmonic Lane-Emden boundary-value
/// problem on a ball:
///
///   (-Delta)^{alpha_j} u_j = |u_{j+1}|^{p_j},  j = 1..m  (u_{m+1} = u_1)
///
/// with the boundary conditions selected by `bc`. When `linear_rhs` is
/// non-empty the power nonlinearity of chain j is replaced by the fixed
/// radial function linear_rhs[j] (manufactured-solution mode).
struct ProblemSpec {
  std::vector<int> alphas;
  std::vector<double> exponents;
  int dimension = 3;
  BoundaryKind bc = BoundaryKind::Dirichlet;
  std::vector<RadialFunction> linear_rhs;

  int m() const { return static_cast<int>(alphas.size()); }
  bool pure_power() const { return linear_rhs.empty(); }
  int max_alpha() const;
  /// Total number of stack levels, sum_j alpha_j.
  int stack_size() const;
  /// Flattened index of stack level k of chain j.
  int level_index(int chain, int level) const;
  double exponent_product() const;
};

struct InvariantCheck {
  std::string name;
  bool ok = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<InvariantCheck> checks;
  bool ok = false;
};

ValidationReport validate(const ProblemSpec& spec);

/// Throws ValidationError naming the first violated invariant.
void require_valid(const ProblemSpec& spec);

/// Catalog parameters: scalars keyed by name ("N", "p", "q", "alpha", "beta").
using Params = std::map<std::string, double, std::less<>>;

/// Builds one of the named problems ("gnn", "biharmonic", "hsys", "delia",
/// "dirichlet-poly", "navier-poly", "natural-poly") and validates it.
ProblemSpec build_problem(std::string_view kind, const Params& params);

const std::vector<std::string>& catalog_names();

nlohmann::json to_json(const ProblemSpec& spec);
/// Parses the ProblemSpec schema. Does not validate.
ProblemSpec problem_from_json(const nlohmann::json& j);

}  // namespace polyshoot
