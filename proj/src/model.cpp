#include "polyshoot/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "polyshoot/errors.hpp"

namespace polyshoot {

std::string to_string(BoundaryKind bc) {
  switch (bc) {
    case BoundaryKind::Dirichlet: return "dirichlet";
    case BoundaryKind::Navier: return "navier";
    case BoundaryKind::Natural: return "natural";
  }
  return "?";
}

BoundaryKind parse_boundary_kind(std::string_view name) {
  if (name == "dirichlet") return BoundaryKind::Dirichlet;
  if (name == "navier") return BoundaryKind::Navier;
  if (name == "natural") return BoundaryKind::Natural;
  throw ValidationError("unknown boundary kind '" + std::string(name) + "'");
}

int ProblemSpec::max_alpha() const {
  return alphas.empty() ? 0 : *std::max_element(alphas.begin(), alphas.end());
}

int ProblemSpec::stack_size() const { return std::accumulate(alphas.begin(), alphas.end(), 0); }

int ProblemSpec::level_index(int chain, int level) const {
  int idx = 0;
  for (int j = 0; j < chain; ++j) idx += alphas[j];
  return idx + level;
}

double ProblemSpec::exponent_product() const {
  double prod = 1.0;
  for (double p : exponents) prod *= p;
  return prod;
}

ValidationReport validate(const ProblemSpec& spec) {
  ValidationReport rep;
  auto add = [&](std::string name, bool ok, std::string detail) {
    rep.checks.push_back({std::move(name), ok, std::move(detail)});
  };

  const bool shape_ok = spec.m() >= 1 && spec.exponents.size() == spec.alphas.size();
  add("chain count", shape_ok,
      "m = " + std::to_string(spec.m()) + ", exponents = " + std::to_string(spec.exponents.size()));

  const bool alphas_ok =
      !spec.alphas.empty() && std::all_of(spec.alphas.begin(), spec.alphas.end(), [](int a) { return a >= 1; });
  add("alpha_j >= 1", alphas_ok, "");

  const int amax = spec.max_alpha();
  add("N > 2 max alpha_j", spec.dimension > 2 * amax,
      "N = " + std::to_string(spec.dimension) + ", 2 max alpha = " + std::to_string(2 * amax));

  if (spec.pure_power()) {
    const bool p_ok = std::all_of(spec.exponents.begin(), spec.exponents.end(),
                                  [](double p) { return std::isfinite(p) && p >= 1.0; });
    add("p_j >= 1", p_ok, "");
    const double prod = spec.exponent_product();
    std::ostringstream os;
    os << "prod p_j = " << prod;
    add("prod p_j > 1", prod > 1.0, os.str());
  } else {
    add("linear rhs per chain", spec.linear_rhs.size() == spec.alphas.size(), "");
  }

  if (spec.bc == BoundaryKind::Natural) add("natural bc needs m = 1", spec.m() == 1, "");

  rep.ok = std::all_of(rep.checks.begin(), rep.checks.end(), [](const InvariantCheck& c) { return c.ok; });
  return rep;
}

void require_valid(const ProblemSpec& spec) {
  const auto rep = validate(spec);
  if (rep.ok) return;
  for (const auto& c : rep.checks) {
    if (!c.ok) throw ValidationError(c.name + (c.detail.empty() ? "" : " (" + c.detail + ")"));
  }
}

const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names = {"gnn",           "biharmonic",  "hsys",        "delia",
                                                 "dirichlet-poly", "navier-poly", "natural-poly"};
  return names;
}

namespace {

double need(const Params& params, std::string_view key, std::string_view kind) {
  auto it = params.find(key);
  if (it == params.end())
    throw ValidationError("problem '" + std::string(kind) + "' needs parameter '" + std::string(key) + "'");
  return it->second;
}

int need_int(const Params& params, std::string_view key, std::string_view kind) {
  const double v = need(params, key, kind);
  if (v != std::floor(v)) throw ValidationError("parameter '" + std::string(key) + "' must be an integer");
  return static_cast<int>(v);
}

}  // namespace

ProblemSpec build_problem(std::string_view kind, const Params& params) {
  ProblemSpec spec;
  spec.dimension = need_int(params, "N", kind);
  if (kind == "gnn") {
    spec.alphas = {1};
    spec.exponents = {need(params, "p", kind)};
  } else if (kind == "biharmonic") {
    spec.alphas = {2};
    spec.exponents = {need(params, "p", kind)};
  } else if (kind == "hsys") {
    // -Delta u = |v|^q, -Delta v = |u|^p
    spec.alphas = {1, 1};
    spec.exponents = {need(params, "q", kind), need(params, "p", kind)};
  } else if (kind == "delia") {
    // Delta^2 u = |v|^q, -Delta v = |u|^p
    spec.alphas = {2, 1};
    spec.exponents = {need(params, "q", kind), need(params, "p", kind)};
  } else if (kind == "dirichlet-poly" || kind == "navier-poly" || kind == "natural-poly") {
    spec.alphas = {need_int(params, "alpha", kind)};
    spec.exponents = {need(params, "p", kind)};
    spec.bc = kind == "dirichlet-poly" ? BoundaryKind::Dirichlet
              : kind == "navier-poly"  ? BoundaryKind::Navier
                                       : BoundaryKind::Natural;
  } else {
    throw UnknownCatalogName("unknown problem '" + std::string(kind) + "'");
  }
  require_valid(spec);
  return spec;
}

nlohmann::json to_json(const ProblemSpec& spec) {
  return {{"m", spec.m()},
          {"alphas", spec.alphas},
          {"exponents", spec.exponents},
          {"dimension", spec.dimension},
          {"bc", to_string(spec.bc)}};
}

ProblemSpec problem_from_json(const nlohmann::json& j) {
  ProblemSpec spec;
  try {
    spec.alphas = j.at("alphas").get<std::vector<int>>();
    spec.exponents = j.at("exponents").get<std::vector<double>>();
    spec.dimension = j.at("dimension").get<int>();
    spec.bc = parse_boundary_kind(j.value("bc", std::string("dirichlet")));
    if (j.contains("m") && j.at("m").get<int>() != spec.m())
      throw ValidationError("field 'm' disagrees with the length of 'alphas'");
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed problem JSON: ") + e.what());
  }
  return spec;
}

}  // namespace polyshoot
