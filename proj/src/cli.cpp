#include "polyshoot/cli.hpp"

#include <openssl/evp.h>
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "polyshoot/analysis.hpp"
#include "polyshoot/compat.hpp"
#include "polyshoot/errors.hpp"
#include "polyshoot/exponents.hpp"

namespace polyshoot::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string error_name(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e)) return "UsageError";
  if (dynamic_cast<const ValidationError*>(&e)) return "ValidationError";
  if (dynamic_cast<const UnknownCatalogName*>(&e)) return "UnknownCatalogName";
  if (dynamic_cast<const DimensionTooSmall*>(&e)) return "DimensionTooSmall";
  if (dynamic_cast<const UnsupportedBoundaryKind*>(&e)) return "UnsupportedBoundaryKind";
  if (dynamic_cast<const BlowUpDominates*>(&e)) return "BlowUpDominates";
  if (dynamic_cast<const ConvergedToTrivial*>(&e)) return "ConvergedToTrivial";
  if (dynamic_cast<const NewtonStalled*>(&e)) return "NewtonStalled";
  if (dynamic_cast<const BlowUpBeforeRadius*>(&e)) return "BlowUpBeforeRadius";
  if (dynamic_cast<const Overflow*>(&e)) return "Overflow";
  if (dynamic_cast<const StepLimitExceeded*>(&e)) return "StepLimitExceeded";
  if (dynamic_cast<const ResolutionError*>(&e)) return "ResolutionError";
  if (dynamic_cast<const DegenerateScaling*>(&e)) return "DegenerateScaling";
  if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
  if (dynamic_cast<const NoContraction*>(&e)) return "NoContraction";
  if (dynamic_cast<const SeriesRadiusTooLarge*>(&e)) return "SeriesRadiusTooLarge";
  if (dynamic_cast<const Error*>(&e)) return "Error";
  return "exception";
}

bool is_usage_error(const std::exception& e) {
  return dynamic_cast<const UsageError*>(&e) || dynamic_cast<const ValidationError*>(&e) ||
         dynamic_cast<const UnknownCatalogName*>(&e) || dynamic_cast<const DimensionTooSmall*>(&e) ||
         dynamic_cast<const UnsupportedBoundaryKind*>(&e) || dynamic_cast<const CLI::Error*>(&e);
}

std::string iso_now() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string read_file(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw UsageError("cannot read " + p.string());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

const std::map<std::string, std::set<std::string>, std::less<>>& catalog_params() {
  static const std::map<std::string, std::set<std::string>, std::less<>> table = {
      {"gnn", {"N", "p"}},
      {"biharmonic", {"N", "p"}},
      {"hsys", {"N", "p", "q"}},
      {"delia", {"N", "p", "q"}},
      {"dirichlet-poly", {"N", "alpha", "p"}},
      {"navier-poly", {"N", "alpha", "p"}},
      {"natural-poly", {"N", "alpha", "p"}},
      {"manufactured", {"N", "alpha"}},
  };
  return table;
}

/// A problem given by catalog name and parameters, or as an explicit spec.
struct ProblemSource {
  std::string catalog;
  Params params;
  ProblemSpec spec;
  bool explicit_spec = false;

  ProblemSpec build() const {
    if (explicit_spec) {
      require_valid(spec);
      return spec;
    }
    auto it = catalog_params().find(catalog);
    if (it == catalog_params().end()) throw UnknownCatalogName("unknown problem '" + catalog + "'");
    for (const auto& [k, v] : params)
      if (!it->second.count(k)) throw UsageError("parameter '" + k + "' does not apply to problem '" + catalog + "'");
    if (catalog == "manufactured") {
      for (const char* k : {"N", "alpha"})
        if (!params.count(k)) throw UsageError(std::string("manufactured problem needs ") + k);
      auto spec = manufactured_problem(static_cast<int>(params.at("alpha")), static_cast<int>(params.at("N")));
      require_valid(spec);
      return spec;
    }
    return build_problem(catalog, params);
  }

  bool manufactured() const { return !explicit_spec && catalog == "manufactured"; }

  json to_json() const {
    if (explicit_spec) return {{"spec", polyshoot::to_json(spec)}};
    json p = json::object();
    for (const auto& [k, v] : params) p[k] = v;
    return {{"catalog", catalog}, {"params", p}};
  }
};

ProblemSource problem_source_from_json(const json& j) {
  ProblemSource src;
  if (j.contains("spec")) {
    src.explicit_spec = true;
    src.spec = problem_from_json(j.at("spec"));
    return src;
  }
  if (!j.contains("catalog")) throw UsageError("problem needs 'catalog' or 'spec'");
  src.catalog = j.at("catalog").get<std::string>();
  if (j.contains("params"))
    for (const auto& [k, v] : j.at("params").items()) src.params[k] = v.get<double>();
  return src;
}

/// Flags shared by every problem-taking subcommand.
struct ProblemFlags {
  std::string problem;
  std::string spec_file;
  double N = 0, alpha = 0, p = 0, q = 0;
  std::string bc;
  CLI::Option* o_problem = nullptr;
  CLI::Option* o_spec = nullptr;
  CLI::Option* o_N = nullptr;
  CLI::Option* o_alpha = nullptr;
  CLI::Option* o_p = nullptr;
  CLI::Option* o_q = nullptr;
  CLI::Option* o_bc = nullptr;

  void add(CLI::App* app) {
    o_problem = app->add_option("--problem", problem, "catalog problem name");
    o_spec = app->add_option("--spec", spec_file, "ProblemSpec JSON file");
    o_N = app->add_option("--N", N, "dimension");
    o_alpha = app->add_option("--alpha", alpha, "order alpha");
    o_p = app->add_option("--p", p, "exponent p");
    o_q = app->add_option("--q", q, "exponent q");
    o_bc = app->add_option("--bc", bc, "dirichlet | navier | natural");
  }

  bool given() const { return o_problem->count() || o_spec->count() || o_alpha->count() || o_p->count(); }

  ProblemSource source() const {
    ProblemSource src;
    if (o_problem->count() && o_spec->count()) throw UsageError("--problem and --spec are exclusive");
    if (o_spec->count()) {
      if (o_N->count() || o_alpha->count() || o_p->count() || o_q->count() || o_bc->count())
        throw UsageError("--spec cannot be combined with problem flags");
      src.explicit_spec = true;
      try {
        src.spec = problem_from_json(json::parse(read_file(spec_file)));
      } catch (const json::exception& e) {
        throw UsageError(std::string("malformed spec file: ") + e.what());
      }
      return src;
    }
    if (o_problem->count()) {
      src.catalog = problem;
      auto it = catalog_params().find(problem);
      if (it == catalog_params().end()) throw UnknownCatalogName("unknown problem '" + problem + "'");
      auto take = [&](CLI::Option* o, const char* name, double v) {
        if (!o->count()) return;
        if (!it->second.count(name))
          throw UsageError(std::string("--") + name + " conflicts with catalog problem '" + problem + "'");
        src.params[name] = v;
      };
      take(o_N, "N", N);
      take(o_alpha, "alpha", alpha);
      take(o_p, "p", p);
      take(o_q, "q", q);
      if (o_bc->count()) {
        BoundaryKind want = parse_boundary_kind(bc);
        BoundaryKind have = problem == "navier-poly"    ? BoundaryKind::Navier
                            : problem == "natural-poly" ? BoundaryKind::Natural
                                                        : BoundaryKind::Dirichlet;
        if (want != have) throw UsageError("--bc conflicts with catalog problem '" + problem + "'");
      }
      return src;
    }
    if (!o_alpha->count() || !o_p->count() || !o_N->count())
      throw UsageError("give --problem, --spec, or all of --alpha --p --N");
    if (o_q->count()) throw UsageError("--q needs a catalog system (--problem hsys | delia)");
    src.explicit_spec = true;
    src.spec.alphas = {static_cast<int>(alpha)};
    src.spec.exponents = {p};
    src.spec.dimension = static_cast<int>(N);
    src.spec.bc = o_bc->count() ? parse_boundary_kind(bc) : BoundaryKind::Dirichlet;
    if (alpha != std::floor(alpha) || N != std::floor(N)) throw UsageError("--alpha and --N must be integers");
    return src;
  }
};

int default_jobs() {
  if (const char* env = std::getenv("POLYSHOOT_JOBS")) {
    try {
      int j = std::stoi(env);
      if (j >= 0) return j;
    } catch (const std::exception&) {
    }
    std::cerr << "ignoring malformed POLYSHOOT_JOBS='" << env << "'\n";
  }
  return 0;
}

struct SolverFlags {
  double tol = 1e-10;
  int starts = 1;
  std::uint64_t seed = 20240101;
  int jobs = default_jobs();
  int grid = kDefaultGridIntervals;
  std::string method = "stepper";
  int max_iters = 300;

  void add(CLI::App* app, int default_starts) {
    starts = default_starts;
    app->add_option("--tol", tol, "Newton tolerance on the scaled boundary residual")->capture_default_str();
    app->add_option("--starts", starts, "multistart count (1 = default guess only)")->capture_default_str();
    app->add_option("--seed", seed, "multistart seed")->capture_default_str();
    app->add_option("--jobs", jobs, "threads (0 = all; default from POLYSHOOT_JOBS)")->capture_default_str();
    app->add_option("--grid", grid, "output grid intervals")->capture_default_str();
    app->add_option("--method", method, "stepper | picard")->capture_default_str();
    app->add_option("--max-iters", max_iters, "Newton iteration limit")->capture_default_str();
  }

  ShootOptions options() const {
    ShootOptions o;
    if (!(tol > 0)) throw UsageError("--tol must be positive");
    if (starts < 1) throw UsageError("--starts must be >= 1");
    if (grid < 8) throw UsageError("--grid must be >= 8");
    o.newton_tol = tol;
    o.multistart_count = starts;
    o.rng_seed = seed;
    o.jobs = jobs;
    o.max_newton_iters = max_iters;
    o.ivp.grid_intervals = grid;
    if (method == "picard")
      o.ivp.method = IvpMethod::Picard;
    else if (method != "stepper")
      throw UsageError("--method must be stepper or picard");
    return o;
  }
};

ShootOptions options_from_json(const json& j) {
  SolverFlags f;
  f.tol = j.value("newton_tol", f.tol);
  f.starts = j.value("starts", f.starts);
  f.grid = j.value("grid_intervals", f.grid);
  f.method = j.value("method", f.method);
  f.max_iters = j.value("max_newton_iters", f.max_iters);
  return f.options();
}

struct SolveResult {
  SolutionRecord record;
  int converged = 0;
  int clusters = 0;
};

/// Default guess for one start, best cluster representative otherwise.
SolveResult solve_problem(const ProblemSpec& spec, const ShootOptions& opts) {
  SolveResult out;
  if (opts.multistart_count <= 1) {
    out.record = solve_bvp(spec, default_unknowns(spec), opts);
    out.converged = out.clusters = 1;
    return out;
  }
  MultistartResult ms = multistart(spec, opts);
  out.converged = static_cast<int>(ms.records.size());
  if (ms.records.empty()) {
    std::string why = ms.outcomes.empty() ? std::string("no starts") : ms.outcomes.front().failure;
    throw NewtonStalled(0.0, "no start converged (first failure: " + why + ")");
  }
  auto clusters = cluster_solutions(ms.records);
  out.clusters = static_cast<int>(clusters.size());
  out.record = ms.records[clusters.front().representative];
  return out;
}

std::string profile_csv(const StackProfile& p) {
  std::ostringstream os;
  write_csv(os, p);
  return os.str();
}

struct Written {
  std::string path;
  std::string sha256;
};

Written emit(const fs::path& dir, const std::string& name, const std::string& content) {
  write_atomic(dir / name, content);
  return {name, sha256_hex(content)};
}

void write_manifest(const fs::path& dir, const json& config, const std::string& started,
                    const std::vector<Written>& files, const json& summary) {
  json m;
  m["tool"] = "polyshoot";
  m["version"] = kVersion;
  m["config"] = config;
  m["config_hash"] = sha256_hex(config.dump());
  m["started"] = started;
  m["finished"] = iso_now();
  m["results"] = json::array();
  for (const auto& f : files) m["results"].push_back({{"path", f.path}, {"sha256", f.sha256}});
  m["summary"] = summary;
  write_atomic(dir / "manifest.json", m.dump(2) + "\n");
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw UsageError("output directory not writable: " + dir.string());
}

struct Checks {
  bool shape = false;
  bool hopf = false;
  bool monotonicity = false;
  bool uniqueness = false;

  bool any() const { return shape || hopf || monotonicity || uniqueness; }
  json to_json() const {
    return {{"shape", shape}, {"hopf", hopf}, {"monotonicity", monotonicity}, {"uniqueness", uniqueness}};
  }
};

Checks checks_from_json(const json& j) {
  Checks c;
  c.shape = j.value("shape", false);
  c.hopf = j.value("hopf", false);
  c.monotonicity = j.value("monotonicity", false);
  c.uniqueness = j.value("uniqueness", false);
  return c;
}

/// Runs the enabled checks on one record; `pass` is cleared by any failure.
json run_checks(const SolutionRecord& rec, const Checks& checks, const ShootOptions& opts, bool& pass) {
  const ProblemSpec& spec = rec.profile.spec;
  const bool single_dirichlet = spec.bc == BoundaryKind::Dirichlet && spec.m() == 1;
  json out = json::object();
  auto skip = [&](const char* name, const char* why) { out[name] = {{"skipped", why}}; };
  if (checks.hopf) {
    if (!single_dirichlet) {
      skip("hopf", "single Dirichlet equation only");
    } else {
      auto r = analysis::hopf_check(rec);
      out["hopf"] = analysis::to_json(r);
      pass = pass && r.pass;
    }
  }
  if (checks.monotonicity) {
    auto r = analysis::monotonicity_check(rec);
    out["monotonicity"] = analysis::to_json(r);
    pass = pass && r.pass();
  }
  if (checks.shape) {
    if (!single_dirichlet || spec.alphas[0] < 2) {
      skip("shape", "single Dirichlet equation with alpha >= 2 only");
    } else {
      try {
        auto r = analysis::shape_report(rec);
        out["shape"] = analysis::to_json(r);
        pass = pass && r.pass;
      } catch (const ResolutionError& e) {
        out["shape"] = {{"pass", false}, {"error", e.what()}};
        pass = false;
      }
    }
  }
  if (checks.uniqueness) {
    ShootOptions o = opts;
    if (o.multistart_count <= 1) o.multistart_count = 20;
    auto r = analysis::uniqueness_report(spec, o);
    json j = analysis::to_json(r);
    j["pass"] = r.clusters.size() == 1;
    out["uniqueness"] = j;
    pass = pass && r.clusters.size() == 1;
  }
  return out;
}

// ---------------------------------------------------------------- solve

struct SolveCmd {
  ProblemFlags problem;
  SolverFlags solver;
  std::string out;
};

int cmd_solve(const SolveCmd& c) {
  const std::string started = iso_now();
  ProblemSource src = c.problem.source();
  ProblemSpec spec = src.build();
  ShootOptions opts = c.solver.options();
  if (!c.out.empty()) make_dir(c.out);
  SolveResult res;
  try {
    res = solve_problem(spec, opts);
  } catch (const Error& e) {
    std::cerr << "solve failed: " << error_name(e) << ": " << e.what() << "\n";
    return kSolverFailure;
  }
  json j = to_json(res.record, c.out.empty() ? "" : "profile.csv");
  j["status"] = "converged";
  j["problem"] = src.to_json();
  j["converged_starts"] = res.converged;
  j["clusters"] = res.clusters;
  if (src.manufactured()) j["max_error"] = manufactured_error(res.record);
  if (!c.out.empty()) {
    fs::path dir = c.out;
    std::vector<Written> files;
    files.push_back(emit(dir, "profile.csv", profile_csv(res.record.profile)));
    files.push_back(emit(dir, "solution.json", j.dump(2) + "\n"));
    json config = {{"command", "solve"},
                   {"problem", src.to_json()},
                   {"solver", {{"newton_tol", opts.newton_tol}, {"starts", opts.multistart_count},
                               {"rng_seed", opts.rng_seed}, {"grid_intervals", opts.ivp.grid_intervals},
                               {"method", c.solver.method}}}};
    write_manifest(dir, config, started, files, {{"converged", true}});
  }
  std::cout << j.dump(2) << "\n";
  return kOk;
}

// ---------------------------------------------------------------- verify

struct VerifyCmd {
  ProblemFlags problem;
  SolverFlags solver;
  std::string solution;
  Checks checks;
  std::string out;
};

int cmd_verify(const VerifyCmd& c) {
  const std::string started = iso_now();
  ShootOptions opts = c.solver.options();
  SolutionRecord rec;
  json problem_json;
  if (!c.solution.empty()) {
    if (c.problem.given()) throw UsageError("--solution cannot be combined with problem flags");
    rec = load_solution(c.solution);
    problem_json = {{"spec", to_json(rec.profile.spec)}};
  } else {
    ProblemSource src = c.problem.source();
    ProblemSpec spec = src.build();
    problem_json = src.to_json();
    try {
      ShootOptions single = opts;
      single.multistart_count = 1;
      rec = solve_problem(spec, single).record;
    } catch (const Error& e) {
      std::cerr << "solve failed: " << error_name(e) << ": " << e.what() << "\n";
      return kSolverFailure;
    }
  }
  Checks checks = c.checks;
  if (!checks.any()) checks.hopf = checks.monotonicity = checks.shape = true;
  bool pass = true;
  json report = run_checks(rec, checks, opts, pass);
  json j = {{"problem", problem_json}, {"checks", checks.to_json()}, {"report", report}, {"pass", pass}};
  if (!c.out.empty()) {
    make_dir(c.out);
    std::vector<Written> files{emit(c.out, "report.json", j.dump(2) + "\n")};
    write_manifest(c.out, {{"command", "verify"}, {"problem", problem_json}, {"checks", checks.to_json()}}, started,
                   files, {{"pass", pass}});
  }
  std::cout << j.dump(2) << "\n";
  if (!pass) std::cerr << "verification failed\n";
  return pass ? kOk : kVerificationFailure;
}

// ---------------------------------------------------------------- sweep

struct Axis {
  std::string name;
  std::vector<double> values;
};

std::vector<Axis> axes_from_json(const json& j) {
  std::vector<Axis> axes;
  if (j.is_null()) return axes;
  if (!j.is_array()) throw UsageError("'sweep' must be an array of axes");
  for (const auto& a : j) {
    Axis ax;
    ax.name = a.at("parameter").get<std::string>();
    if (a.contains("values")) {
      ax.values = a.at("values").get<std::vector<double>>();
    } else {
      double from = a.at("from").get<double>(), to = a.at("to").get<double>(), step = a.at("step").get<double>();
      if (!(step > 0) || to < from) throw UsageError("axis '" + ax.name + "' needs from <= to and step > 0");
      long n = std::lround(std::floor((to - from) / step + 1e-9)) + 1;
      for (long i = 0; i < n; ++i) ax.values.push_back(std::round((from + i * step) * 1e12) / 1e12);
    }
    if (ax.values.empty()) throw UsageError("axis '" + ax.name + "' has no values");
    axes.push_back(std::move(ax));
  }
  return axes;
}

/// Applies one axis value to the problem; throws UsageError for unknown fields.
void apply_axis(ProblemSource& src, const std::string& name, double v) {
  if (!src.explicit_spec) {
    const auto& allowed = catalog_params().at(src.catalog);
    if (!allowed.count(name)) throw UsageError("sweep axis '" + name + "' is not a parameter of '" + src.catalog + "'");
    src.params[name] = v;
    return;
  }
  ProblemSpec& s = src.spec;
  auto chain_index = [&](const std::string& prefix) -> int {
    if (name == prefix && s.m() == 1) return 0;
    if (name.size() > prefix.size() && name.compare(0, prefix.size(), prefix) == 0) {
      int j = std::atoi(name.c_str() + prefix.size());
      if (j >= 1 && j <= s.m()) return j - 1;
    }
    return -1;
  };
  if (name == "N") {
    s.dimension = static_cast<int>(v);
  } else if (int j = chain_index("p"); j >= 0) {
    s.exponents[static_cast<std::size_t>(j)] = v;
  } else if (int k = chain_index("alpha"); k >= 0) {
    s.alphas[static_cast<std::size_t>(k)] = static_cast<int>(v);
  } else {
    throw UsageError("sweep axis '" + name + "' is not a field of the problem");
  }
}

struct Row {
  std::vector<double> axis_values;
  std::string status = "ok";
  std::string error;
  double serrin_lhs = std::nan("");
  std::string classification;
  int converged = 0;
  int clusters = 0;
  double bc_residual = std::nan("");
  double max_error = std::nan("");
  bool checks_pass = true;
  json detail;
};

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

Row run_row(ProblemSource src, const std::vector<Axis>& axes, const std::vector<double>& values,
            const ShootOptions& opts, bool solve, const Checks& checks) {
  Row row;
  row.axis_values = values;
  row.detail = json::object();
  try {
    for (std::size_t a = 0; a < axes.size(); ++a) apply_axis(src, axes[a].name, values[a]);
    ProblemSpec spec = src.build();
    row.detail["problem"] = src.to_json();
    if (spec.pure_power()) {
      auto rep = exponents::report(spec);
      row.serrin_lhs = *std::max_element(rep.serrin_lhs.begin(), rep.serrin_lhs.end());
      row.classification = exponents::to_string(rep.classification);
      row.detail["exponents"] = exponents::to_json(rep);
    }
    if (solve) {
      try {
        SolveResult res = solve_problem(spec, opts);
        row.converged = res.converged;
        row.clusters = res.clusters;
        row.bc_residual = res.record.bc_residual_norm;
        row.detail["solution"] = to_json(res.record);
        if (src.manufactured()) row.max_error = manufactured_error(res.record);
        if (checks.any()) {
          bool pass = true;
          row.detail["checks"] = run_checks(res.record, checks, opts, pass);
          row.checks_pass = pass;
        }
      } catch (const Error& e) {
        row.status = "solver_failure";
        row.error = error_name(e) + ": " + e.what();
        row.checks_pass = false;
      }
    }
  } catch (const std::exception& e) {
    row.status = "invalid";
    row.error = error_name(e) + ": " + e.what();
    row.checks_pass = false;
  }
  row.detail["status"] = row.status;
  if (!row.error.empty()) row.detail["error"] = row.error;
  return row;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

struct SweepCmd {
  std::string config;
  std::string out;
  int jobs = default_jobs();
};

int cmd_sweep(const SweepCmd& c) {
  const std::string started = iso_now();
  json cfg;
  try {
    cfg = json::parse(read_file(c.config));
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed config: ") + e.what());
  }
  ProblemSource src;
  std::vector<Axis> axes;
  ShootOptions opts;
  Checks checks;
  bool solve = true;
  try {
    src = problem_source_from_json(cfg.at("problem"));
    axes = axes_from_json(cfg.value("sweep", json()));
    opts = options_from_json(cfg.value("solver", json::object()));
    opts.rng_seed = cfg.value("rng_seed", opts.rng_seed);
    json an = cfg.value("analysis", json::object());
    checks = checks_from_json(an);
    solve = an.value("solve", true);
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed config: ") + e.what());
  }
  // Rows run concurrently; each row's multistart stays on its thread.
  opts.jobs = 1;
  std::string out = !c.out.empty() ? c.out : cfg.value("output_dir", std::string());
  if (out.empty()) throw UsageError("no output directory (--out or output_dir)");
  if (!src.explicit_spec && !catalog_params().count(src.catalog))
    throw UnknownCatalogName("unknown problem '" + src.catalog + "'");
  {
    // Axis names are checked once up front so a typo is a usage error.
    ProblemSource probe = src;
    for (const auto& ax : axes) apply_axis(probe, ax.name, ax.values.front());
  }
  make_dir(fs::path(out) / "rows");

  std::vector<std::vector<double>> tuples{{}};
  for (const auto& ax : axes) {
    std::vector<std::vector<double>> next;
    for (const auto& t : tuples)
      for (double v : ax.values) {
        auto u = t;
        u.push_back(v);
        next.push_back(std::move(u));
      }
    tuples = std::move(next);
  }

  const int n = static_cast<int>(tuples.size());
  std::vector<Row> rows(tuples.size());
  std::vector<Written> row_files(tuples.size());
  const int threads = c.jobs > 0 ? c.jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int i = 0; i < n; ++i) {
    auto idx = static_cast<std::size_t>(i);
    rows[idx] = run_row(src, axes, tuples[idx], opts, solve, checks);
    std::ostringstream name;
    name << "rows/row_" << std::setw(4) << std::setfill('0') << i << ".json";
    json j = rows[idx].detail;
    j["index"] = i;
    row_files[idx] = emit(out, name.str(), j.dump(2) + "\n");
  }

  std::ostringstream csv;
  csv << "index";
  for (const auto& ax : axes) csv << "," << ax.name;
  csv << ",serrin_lhs,classification,status,converged,clusters,bc_residual,max_error,checks_pass,error\n";
  int ok = 0;
  for (int i = 0; i < n; ++i) {
    const Row& r = rows[static_cast<std::size_t>(i)];
    csv << i;
    for (double v : r.axis_values) csv << "," << fmt(v);
    csv << "," << fmt(r.serrin_lhs) << "," << r.classification << "," << r.status << "," << r.converged << ","
        << r.clusters << "," << fmt(r.bc_residual) << "," << fmt(r.max_error) << "," << (r.checks_pass ? 1 : 0)
        << "," << csv_quote(r.error) << "\n";
    if (r.status == "ok" && r.checks_pass) ++ok;
  }
  std::vector<Written> files = row_files;
  files.push_back(emit(out, "outcomes.csv", csv.str()));
  write_manifest(out, cfg, started, files, {{"rows", n}, {"ok", ok}, {"failed", n - ok}});
  std::cout << csv.str();
  return kOk;
}

// ---------------------------------------------------------------- complementing

struct ComplementingCmd {
  std::string bc;
  int alpha = 0;
  std::string convention = "paper";
  bool as_json = false;
};

int cmd_complementing(const ComplementingCmd& c) {
  if (c.alpha < 1) throw UsageError("--alpha must be >= 1");
  compat::SymbolConvention conv;
  if (c.convention == "paper")
    conv = compat::SymbolConvention::Paper;
  else if (c.convention == "standard")
    conv = compat::SymbolConvention::Standard;
  else
    throw UsageError("--convention must be paper or standard");
  auto rep = compat::complementing_check(parse_boundary_kind(c.bc), c.alpha, conv);
  if (c.as_json) {
    std::cout << compat::to_json(rep).dump(2) << "\n";
  } else {
    for (std::size_t k = 0; k < rep.symbols.size(); ++k)
      std::cout << "B" << k + 1 << " = " << compat::to_pretty(rep.symbols[k]) << "  ->  "
                << compat::to_pretty(rep.remainders[k]) << "\n";
    std::cout << "rank " << rep.rank << " of " << rep.alpha << ": "
              << (rep.independent ? "independent" : "dependent") << "\n";
  }
  return rep.independent ? kOk : kVerificationFailure;
}

// ---------------------------------------------------------------- exponents

int cmd_exponents(const ProblemFlags& f) {
  ProblemSource src = f.source();
  ProblemSpec spec = src.build();
  if (!spec.pure_power()) throw UsageError("exponents need a power nonlinearity");
  json j = exponents::to_json(exponents::report(spec));
  j["problem"] = src.to_json();
  std::cout << j.dump(2) << "\n";
  return kOk;
}

// ---------------------------------------------------------------- signtable

struct SignTableCmd {
  ProblemFlags problem;
  SolverFlags solver;
  std::vector<double> delta;
  std::string u_file, w_file;
  std::string format = "text";
  bool lemma = false;
  std::string out;
};

int cmd_signtable(const SignTableCmd& c) {
  const std::string started = iso_now();
  ShootOptions opts = c.solver.options();
  SolutionRecord u, w;
  json problem_json;
  if (!c.u_file.empty() || !c.w_file.empty()) {
    if (c.u_file.empty() || c.w_file.empty()) throw UsageError("--u and --w go together");
    if (c.problem.given() || !c.delta.empty()) throw UsageError("--u/--w cannot be combined with --problem or --delta");
    u = load_solution(c.u_file);
    w = load_solution(c.w_file);
    problem_json = {{"spec", to_json(u.profile.spec)}};
  } else {
    ProblemSource src = c.problem.source();
    ProblemSpec spec = src.build();
    problem_json = src.to_json();
    try {
      ShootOptions single = opts;
      single.multistart_count = 1;
      u = solve_problem(spec, single).record;
    } catch (const Error& e) {
      std::cerr << "solve failed: " << error_name(e) << ": " << e.what() << "\n";
      return kSolverFailure;
    }
    if (c.delta.size() != u.initial_stack.size())
      throw UsageError("--delta needs " + std::to_string(u.initial_stack.size()) + " relative shifts");
    std::vector<double> shift(c.delta.size());
    for (std::size_t k = 0; k < shift.size(); ++k) shift[k] = c.delta[k] * u.initial_stack[k];
    try {
      w = analysis::perturbed_record(u, shift, opts.ivp);
    } catch (const Error& e) {
      std::cerr << "perturbed integration failed: " << error_name(e) << ": " << e.what() << "\n";
      return kSolverFailure;
    }
  }
  analysis::SignTable table;
  try {
    table = analysis::sign_table(analysis::normalize_pair(u, w));
  } catch (const DegenerateScaling& e) {
    std::cerr << "DegenerateScaling: " << e.what() << "\n";
    return kVerificationFailure;
  }
  json j = analysis::to_json(table);
  j["problem"] = problem_json;
  bool pass = true;
  if (c.lemma) {
    auto rep = analysis::zero_count_lemma_check(table, u.profile.spec.alphas[0]);
    j["lemma"] = analysis::to_json(rep);
    pass = rep.pass || !rep.applicable || rep.exploratory || rep.skipped;
  }
  std::ostringstream csv;
  analysis::write_csv(csv, table);
  if (c.format == "json")
    std::cout << j.dump(2) << "\n";
  else if (c.format == "csv")
    std::cout << csv.str();
  else if (c.format == "text")
    std::cout << analysis::render_text(table);
  else
    throw UsageError("--format must be text, csv or json");
  if (!c.out.empty()) {
    make_dir(c.out);
    std::vector<Written> files{emit(c.out, "signtable.json", j.dump(2) + "\n"), emit(c.out, "signtable.csv", csv.str()),
                               emit(c.out, "signtable.txt", analysis::render_text(table))};
    write_manifest(c.out, {{"command", "signtable"}, {"problem", problem_json}, {"delta", c.delta}}, started, files,
                   {{"pass", pass}});
  }
  return pass ? kOk : kVerificationFailure;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::ostringstream os;
  os << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) os << std::setw(2) << static_cast<int>(md[i]);
  return os.str();
}

void write_atomic(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw UsageError("cannot write " + tmp.string());
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw UsageError("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

double manufactured_constant(int alpha, int dimension) {
  // Only the leading term (-1)^alpha r^{2 alpha} survives alpha Laplacians.
  double c = 1.0;
  for (int k = 1; k <= alpha; ++k) c *= 2.0 * k * (2.0 * k + dimension - 2);
  return c;
}

ProblemSpec manufactured_problem(int alpha, int dimension) {
  ProblemSpec spec;
  spec.alphas = {alpha};
  spec.exponents = {1.0};
  spec.dimension = dimension;
  spec.bc = BoundaryKind::Dirichlet;
  const double c = manufactured_constant(alpha, dimension);
  spec.linear_rhs = {[c](double) { return c; }};
  return spec;
}

double manufactured_error(const SolutionRecord& rec) {
  const int alpha = rec.profile.spec.alphas.at(0);
  const auto& u = rec.profile.level(0, 0);
  double err = 0.0;
  for (std::size_t i = 0; i < rec.profile.grid.size(); ++i) {
    double r = rec.profile.grid[i];
    err = std::max(err, std::abs(u[i] - std::pow(1.0 - r * r, alpha)));
  }
  return err;
}

SolutionRecord load_solution(const fs::path& json_path) {
  json j;
  try {
    j = json::parse(read_file(json_path));
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed solution file: ") + e.what());
  }
  SolutionRecord rec;
  try {
    ProblemSpec spec = problem_from_json(j.at("spec"));
    fs::path csv = j.at("profile_csv_path").get<std::string>();
    if (csv.empty()) throw UsageError("solution file has no profile CSV");
    if (csv.is_relative()) csv = json_path.parent_path() / csv;
    std::ifstream is(csv);
    if (!is) throw UsageError("cannot read " + csv.string());
    rec.profile = read_csv(is, spec);
    rec.initial_stack = j.at("initial_stack").get<std::vector<double>>();
    rec.shoot_radius = j.value("shoot_radius", rec.profile.radius());
    rec.bc_residual_norm = j.value("bc_residual_norm", 0.0);
    rec.ode_defect_norm = j.value("ode_defect_norm", 0.0);
    rec.newton_iterations = j.value("newton_iterations", 0);
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed solution file: ") + e.what());
  }
  return rec;
}

int run(int argc, char** argv) {
  CLI::App app{"Radial polyharmonic Lane-Emden solver and verifier"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SolveCmd solve;
  auto* s = app.add_subcommand("solve", "solve a problem and write the solution");
  solve.problem.add(s);
  solve.solver.add(s, 1);
  s->add_option("--out", solve.out, "output directory");

  VerifyCmd verify;
  auto* v = app.add_subcommand("verify", "run lemma checks on a solution");
  verify.problem.add(v);
  verify.solver.add(v, 20);
  v->add_option("--solution", verify.solution, "solution JSON written by solve");
  v->add_flag("--shape", verify.checks.shape, "shape counts of Delta^s u");
  v->add_flag("--hopf", verify.checks.hopf, "boundary sign");
  v->add_flag("--monotonicity", verify.checks.monotonicity, "u > 0 and u' < 0");
  v->add_flag("--uniqueness", verify.checks.uniqueness, "multistart and clustering");
  v->add_option("--out", verify.out, "output directory");

  SweepCmd sweep;
  auto* w = app.add_subcommand("sweep", "run a parameter sweep from a JSON config");
  w->add_option("config", sweep.config, "config JSON")->required();
  w->add_option("--out", sweep.out, "output directory (overrides output_dir)");
  w->add_option("--jobs", sweep.jobs, "concurrent rows (0 = all; default from POLYSHOOT_JOBS)");

  ComplementingCmd comp;
  auto* cp = app.add_subcommand("complementing", "check the complementing condition");
  cp->add_option("--bc", comp.bc, "dirichlet | navier | natural")->required();
  cp->add_option("--alpha", comp.alpha, "order alpha")->required();
  cp->add_option("--convention", comp.convention, "paper | standard")->capture_default_str();
  cp->add_flag("--json", comp.as_json, "print the JSON report");

  ProblemFlags expo;
  auto* e = app.add_subcommand("exponents", "print exponent quantities");
  expo.add(e);

  SignTableCmd table;
  auto* t = app.add_subcommand("signtable", "sign table of a scaling-normalized pair");
  table.problem.add(t);
  table.solver.add(t, 1);
  t->add_option("--delta", table.delta, "relative shifts of the origin stack for the second profile")
      ->expected(1, -1);
  t->add_option("--u", table.u_file, "first solution JSON");
  t->add_option("--w", table.w_file, "second solution JSON");
  t->add_option("--format", table.format, "text | csv | json")->capture_default_str();
  t->add_flag("--lemma", table.lemma, "apply the zero-count check");
  t->add_option("--out", table.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForAllHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForVersion& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex);
    return kUsage;
  }

  try {
    if (s->parsed()) return cmd_solve(solve);
    if (v->parsed()) return cmd_verify(verify);
    if (w->parsed()) return cmd_sweep(sweep);
    if (cp->parsed()) return cmd_complementing(comp);
    if (e->parsed()) return cmd_exponents(expo);
    if (t->parsed()) return cmd_signtable(table);
  } catch (const std::exception& ex) {
    std::cerr << error_name(ex) << ": " << ex.what() << "\n";
    return is_usage_error(ex) ? kUsage : kSolverFailure;
  }
  return kUsage;
}

int run(const std::vector<std::string>& args) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.push_back("polyshoot");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : storage) argv.push_back(a.data());
  argv.push_back(nullptr);
  return run(static_cast<int>(storage.size()), argv.data());
}

}  // namespace polyshoot::cli
