#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "polyshoot/integrator.hpp"
#include "polyshoot/model.hpp"
#include "polyshoot/radial_core.hpp"

namespace polyshoot {

/// Origin stack a_{j,k} (flattened; a[0] is the fixed normalization
/// u_1(0)) together with the free outer radius.
struct ShootingUnknowns {
  std::vector<double> a;
  double radius = 1.0;
};

struct ShootOptions {
  double newton_tol = 1e-10;
  int max_newton_iters = 300;
  double fd_jacobian_step = 1e-6;
  int max_halvings = 8;
  /// Largest Newton step in log-variables before the line search.
  double max_log_step = 2.0;
  int multistart_count = 20;
  std::uint64_t rng_seed = 20240101;
  double trivial_threshold = 1e-8;
  /// Screening tolerance on the relative boundary residual of the unit-ball profile.
  double bc_tol = 1e-7;
  /// 0 = OpenMP default.
  int jobs = 0;
  IntegratorOptions ivp;
};

struct SolutionRecord {
  StackProfile profile;  ///< on [0, 1] for pure-power problems
  std::vector<double> initial_stack;
  double shoot_radius = 0.0;
  double bc_residual_norm = 0.0;
  double ode_defect_norm = 0.0;
  int newton_iterations = 0;
};

/// Boundary residual of a profile at its outer radius R: Dirichlet gives
/// u_j^{(k)}(R), Navier w_{j,k}(R), natural alternately w_{2k}(R), w_{2k}'(R).
std::vector<double> bc_residual(const StackProfile& profile);

/// Integrates from the origin stack to R and returns bc_residual there.
/// Throws BlowUpBeforeRadius with the blow-up radius.
std::vector<double> bc_residual(const ProblemSpec& spec, const ShootingUnknowns& x,
                                const IntegratorOptions& opts = {});

/// Polynomial initial guess built from the profile (1 - (r/R)^2)^alpha_j.
ShootingUnknowns default_unknowns(const ProblemSpec& spec, double normalization = 1.0);

/// Damped Newton on (log a_free, log R) with a finite-difference Jacobian,
/// then rescaling of the converged profile to the unit ball.
SolutionRecord solve_bvp(const ProblemSpec& spec, const ShootingUnknowns& init, const ShootOptions& opts = {});

struct StartOutcome {
  ShootingUnknowns start;
  bool converged = false;
  std::string failure;
};

struct MultistartResult {
  std::vector<SolutionRecord> records;  ///< converged, in start-index order
  std::vector<StartOutcome> outcomes;   ///< one per start
};

/// Random start i: a_{j,k} log-uniform in [1e-2, 1e2] (a_{1,0} = 1),
/// R uniform in [0.5, 5]; depends only on (seed, i).
ShootingUnknowns random_start(const ProblemSpec& spec, std::uint64_t seed, int index);

/// Runs solve_bvp from every start concurrently (OpenMP).
MultistartResult multistart(const ProblemSpec& spec, const ShootOptions& opts = {});
/// Single-threaded reference with identical results.
MultistartResult multistart_serial(const ProblemSpec& spec, const ShootOptions& opts = {});

struct Cluster {
  std::size_t representative = 0;  ///< index into the clustered records
  std::vector<std::size_t> members;
};

/// Relative sup-norm distance of the u_1 profiles (same grid size required).
double profile_distance(const StackProfile& a, const StackProfile& b);

/// Greedy clustering; representatives are the lowest-residual members.
std::vector<Cluster> cluster_solutions(const std::vector<SolutionRecord>& records, double tol_rel = 1e-6);

/// The equivalent system of lower-order Dirichlet problems: Navier gives
/// alpha_j second-order equations per chain; natural gives biharmonic
/// equations (plus one second-order equation for odd alpha).
ProblemSpec decomposed_spec(const ProblemSpec& spec);

/// Solves the decomposed system and maps it back onto the original stack.
SolutionRecord navier_decomposition_solve(const ProblemSpec& spec, const ShootOptions& opts = {});
SolutionRecord navier_decomposition_solve(const ProblemSpec& spec, const ShootingUnknowns& init,
                                          const ShootOptions& opts);

nlohmann::json to_json(const SolutionRecord& rec, const std::string& profile_csv_path = "");

}  // namespace polyshoot
