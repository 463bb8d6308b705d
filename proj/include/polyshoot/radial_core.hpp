#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "polyshoot/model.hpp"

namespace polyshoot {

/// Nodes 0 = r_0 < r_1 < ... < r_M = R.
class RadialGrid {
 public:
  RadialGrid() = default;
  /// Throws DomainError unless the nodes are strictly increasing from 0.
  explicit RadialGrid(std::vector<double> nodes);
  static RadialGrid uniform(double radius, int intervals);

  const std::vector<double>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  double operator[](std::size_t i) const { return nodes_[i]; }
  double radius() const { return nodes_.back(); }

 private:
  std::vector<double> nodes_;
};

inline constexpr int kDefaultGridIntervals = 4096;

/// Sampled signed stack w_{j,k} = (-Delta)^k u_j and its radial derivative.
/// values[l][i] is level l (flattened over chains) at node i.
struct StackProfile {
  ProblemSpec spec;
  RadialGrid grid;
  std::vector<std::vector<double>> values;
  std::vector<std::vector<double>> dvalues;

  double radius() const { return grid.radius(); }
  const std::vector<double>& level(int chain, int k) const { return values[spec.level_index(chain, k)]; }
  const std::vector<double>& dlevel(int chain, int k) const { return dvalues[spec.level_index(chain, k)]; }
  /// Stack values at r = 0 (the initial stack a_{j,k}).
  std::vector<double> origin_stack() const;
  /// Largest |value| across all levels and nodes.
  double scale() const;
};

/// Kernel inverting -Delta from the origin:
///   K(r, s) = s (1 - (s/r)^{N-2}) / (N-2),  0 <= s <= r.
double kernel(int dimension, double r, double s);

/// Ordinary radial derivatives u_j^{(k)}(R), k = 0..max_order, of chain j at
/// the outer radius, recovered from stack values via
///   f'' = Delta f - (N-1)/r f'  differentiated repeatedly.
/// Throws NeedsRHS if the tail level beyond the stack would be required.
std::vector<double> boundary_derivatives(const StackProfile& profile, int chain, int max_order);
/// Same, defaulting to orders 0..alpha_j - 1.
std::vector<double> boundary_derivatives(const StackProfile& profile, int chain);

struct ZeroTolerance {
  double abs = 1e-9;
  double rel = 1e-9;
};

struct ZeroCount {
  int interior = 0;
  bool endpoint = false;  ///< |f(R)| < delta
  std::vector<double> locations;
  /// Grid cell index (left node) of each interior zero.
  std::vector<std::size_t> cells;
  int inclusive() const { return interior + (endpoint ? 1 : 0); }
};

/// Sign changes of a sampled function on (0, R], counted with hysteresis:
/// a change registers only when f moves from beyond +delta to beyond -delta
/// (or back), delta = tol.abs + tol.rel * max|f|. Zero locations come from
/// local quadratic interpolation. Throws ResolutionError when two zeros share
/// a grid cell or consecutive zeros are closer than three nodes.
ZeroCount count_zeros(std::span<const double> r, std::span<const double> f, ZeroTolerance tol = {});

/// Interior critical points on (0, R): zeros of the sampled derivative,
/// excluding the endpoint.
ZeroCount count_critical_points(std::span<const double> r, std::span<const double> df, ZeroTolerance tol = {});

/// w~(r) = lambda^{s_j} w(lambda r) with stack level k scaled by
/// lambda^{s_j + 2k}; the result lives on [0, R / lambda].
StackProfile rescale(const StackProfile& profile, double lambda);
/// Rescale a profile on [0, R] to the unit ball (lambda = R).
StackProfile rescale_to_unit(const StackProfile& profile);

/// Cubic Hermite interpolation of level l at radius x (values + dvalues).
double sample_level(const StackProfile& profile, int level, double x);
double sample_dlevel(const StackProfile& profile, int level, double x);

/// CSV: r, w_{j,k} for all (j,k), then dw_{j,k}.
void write_csv(std::ostream& os, const StackProfile& profile);
/// Inverse of write_csv for a profile of `spec`. Throws ValidationError on a
/// column mismatch or malformed row.
StackProfile read_csv(std::istream& is, const ProblemSpec& spec);

}  // namespace polyshoot
