#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "polyshoot/radial_core.hpp"
#include "polyshoot/shooting.hpp"

namespace polyshoot::analysis {

/// Boundary sign of the Hopf quantity: Delta^{alpha/2} u(1) for even alpha,
/// -(Delta^{(alpha-1)/2} u)'(1) for odd alpha.
struct HopfReport {
  int chain = 0;
  int alpha = 0;
  std::string quantity;
  double value = 0.0;
  double margin = 0.0;  ///< 1e-8 * sup of the level involved
  bool pass = false;
  bool non_solution = false;  ///< sup|u| below the trivial threshold
};

HopfReport hopf_check(const SolutionRecord& record, int chain = 0);

/// Lemma-style positivity and monotonicity: u > 0 on [0, R), u' < 0 on
/// (0, R) at every node, with |u'(0)| <= tol * scale at the first node.
struct MonotonicityReport {
  bool positive = false;
  bool decreasing = false;
  double worst_value = 0.0;       ///< min over [0, R) of u / scale
  double worst_derivative = 0.0;  ///< max over (0, R) of u' / scale
  bool pass() const { return positive && decreasing; }
};

MonotonicityReport monotonicity_check(const SolutionRecord& record, int chain = 0, double tol = 1e-10);

/// Shape data of Delta^s u, s = 1..alpha-1.
struct LevelShape {
  int s = 0;
  int zeros_interior = 0;
  bool zero_at_boundary = false;
  int zeros_inclusive = 0;
  int critical_points = 0;
  int origin_sign = 0;
  int boundary_sign = 0;
  int boundary_derivative_sign = 0;

  int expected_zeros = 0;  ///< inclusive of r = 1
  int expected_critical = 0;
  int expected_origin_sign = 0;
  int expected_boundary_sign = 0;
  /// 0: must vanish; +1: must be >= 0; -1: must be <= 0.
  int expected_boundary_derivative = 0;

  bool zeros_ok = false;
  bool critical_ok = false;
  bool signs_ok = false;
};

struct ShapeReport {
  int alpha = 0;
  std::vector<LevelShape> levels;  ///< s = alpha-1 down to 1
  bool pass = false;
};

/// Predicted (zeros inclusive of r = 1, critical points in (0, 1)) of
/// Delta^s u for a Dirichlet solution of order alpha.
struct ExpectedShape {
  int zeros = 0;
  int critical = 0;
  int boundary_sign = 0;
  int boundary_derivative = 0;
};
ExpectedShape expected_shape(int alpha, int s);

ShapeReport shape_report(const SolutionRecord& record, ZeroTolerance tol = {});

/// u and w~(r) = lambda^s w(lambda r) with w~(0) = u(0), both sampled on a
/// common uniform grid of [0, min{1, 1/lambda}].
struct NormalizedPair {
  StackProfile u;
  StackProfile w_tilde;
  double lambda = 1.0;
};

NormalizedPair normalize_pair(const SolutionRecord& u, const SolutionRecord& w);
NormalizedPair normalize_pair(const StackProfile& u, const StackProfile& w);

/// Re-integrates from the origin stack of `base` shifted by `delta` (no
/// re-solve) on the same radius and grid.
SolutionRecord perturbed_record(const SolutionRecord& base, std::span<const double> delta,
                                const IntegratorOptions& opts = {});

enum class RowKind { Origin, Interval, Breakpoint, Endpoint };

struct SignRow {
  RowKind kind = RowKind::Interval;
  double r_lo = 0.0;
  double r_hi = 0.0;
  std::vector<int> signs;  ///< +1, -1, 0 per column
};

struct SignTable {
  std::vector<std::string> columns;
  double radius = 0.0;
  std::vector<double> breakpoints;
  /// Columns vanishing at each breakpoint.
  std::vector<std::vector<int>> vanishing;
  /// Breakpoints where more than one column vanishes in the same cell.
  std::vector<std::size_t> flagged;
  std::vector<SignRow> rows;
  /// Interior zeros per column.
  std::vector<int> column_zeros;
  bool degenerate = false;
  /// Smallest gap between consecutive breakpoints (accumulation diagnostic).
  double min_gap = 0.0;
  /// Last breakpoint when the gaps shrink monotonically over at least four breakpoints.
  double accumulation_point = -1.0;

  /// Interval and breakpoint sign vectors in order, starting with the origin.
  std::vector<std::vector<int>> transitions() const;
};

/// Difference columns Delta^k(u_j - w~_j), chain by chain; later chains are
/// negated when alpha_1 is odd.
SignTable sign_table(const NormalizedPair& pair, ZeroTolerance tol = {});

/// Engine on arbitrary sampled columns.
SignTable sign_table_from_columns(std::span<const double> r, const std::vector<std::vector<double>>& columns,
                                  std::vector<std::string> names, ZeroTolerance tol = {});

std::string render_text(const SignTable& table);
void write_csv(std::ostream& os, const SignTable& table);
nlohmann::json to_json(const SignTable& table);

enum class LemmaConfiguration { None, ZeroCount, ZeroCountRemark };

struct ZeroCountReport {
  LemmaConfiguration configuration = LemmaConfiguration::None;
  int n = 0;  ///< zeros of the first column
  int z = 0;  ///< zeros of column alpha-1
  int required = 0;
  bool applicable = false;
  bool exploratory = false;  ///< alpha >= 5: recorded, not asserted
  bool skipped = false;      ///< degenerate table
  bool pass = false;
};

/// Reads the initial configuration off the origin row: first column 0 and
/// (-Delta)^k(u - w~)(0) < 0 for k >= 1 requires z >= n + 1; all
/// (-Delta)^k(u - w~)(0) < 0 requires z >= n.
ZeroCountReport zero_count_lemma_check(const SignTable& table, int alpha);

struct UniquenessReport {
  ProblemSpec spec;
  bool within_theorem = false;  ///< every alpha_j <= 4
  int starts = 0;
  int converged = 0;
  std::vector<Cluster> clusters;
  std::vector<double> pairwise_distances;  ///< between cluster representatives
  std::vector<HopfReport> hopf;            ///< per cluster (Dirichlet, m = 1)
  std::vector<ShapeReport> shape;          ///< per cluster (Dirichlet, m = 1, alpha >= 2)
  std::vector<MonotonicityReport> monotonicity;
  std::vector<std::string> failures;
  std::vector<SolutionRecord> representatives;
};

UniquenessReport uniqueness_report(const ProblemSpec& spec, const ShootOptions& opts = {});

nlohmann::json to_json(const HopfReport& r);
nlohmann::json to_json(const ShapeReport& r);
nlohmann::json to_json(const MonotonicityReport& r);
nlohmann::json to_json(const ZeroCountReport& r);
nlohmann::json to_json(const UniquenessReport& r);

}  // namespace polyshoot::analysis
