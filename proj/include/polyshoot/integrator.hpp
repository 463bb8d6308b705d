#pragma once

#include <span>
#include <vector>

#include "polyshoot/model.hpp"
#include "polyshoot/radial_core.hpp"

namespace polyshoot {

/// First-order state: for each flattened stack level l, state[2l] = w_l and
/// state[2l+1] = w_l'.
using IvpState = std::vector<double>;

enum class IvpMethod { AdaptiveStepper, Picard };

struct IntegratorOptions {
  double rel_tol = 1e-12;
  double abs_tol = 1e-13;
  /// Series start radius as a fraction of the integration radius.
  double r_series = 1e-4;
  long max_steps = 200000;
  /// |state| above this multiple of max(1, |initial state|) is treated as blow-up.
  double blowup_threshold = 1e12;
  int grid_intervals = kDefaultGridIntervals;
  IvpMethod method = IvpMethod::AdaptiveStepper;
  /// Picard: nodes per subinterval and sweeps allowed before halving it.
  int picard_window = 256;
  int picard_max_sweeps = 200;
  int picard_min_window = 8;
};

/// Right-hand side of the first-order radial system at r > 0:
///   w_l'' = -next_l - (N-1)/r w_l'
/// where next_l is the following stack level, or at the tail of chain j the
/// forcing |w_{j+1,0}|^{p_j} (cyclic) or the linear right-hand side.
void rhs(const ProblemSpec& spec, double r, std::span<const double> state, std::span<double> dstate);
IvpState rhs(const ProblemSpec& spec, double r, const IvpState& state);

/// Forcing of the tail level of `chain` given the current level values.
double tail_forcing(const ProblemSpec& spec, int chain, double r, std::span<const double> level_values);

/// Even Taylor start w = a - r0^2 T/(2N), w' = -r0 T/N where T is the next
/// level at the origin. Throws SeriesRadiusTooLarge if the quartic term
/// estimate exceeds the tolerance abs_tol + rel_tol * max|a|.
IvpState series_start(const ProblemSpec& spec, std::span<const double> a, double r0,
                      const IntegratorOptions& opts = {});

/// Largest series radius whose quartic term estimate is within tolerance.
double safe_series_radius(const ProblemSpec& spec, std::span<const double> a, const IntegratorOptions& opts);

/// State at r_end (no grid output). Throws Overflow on blow-up.
IvpState integrate_endpoint(const ProblemSpec& spec, std::span<const double> a, double r_end,
                            const IntegratorOptions& opts = {});

/// Stack profile on a uniform grid of [0, r_end], from the adaptive stepper
/// or the Picard iteration depending on opts.method.
StackProfile integrate(const ProblemSpec& spec, std::span<const double> a, double r_end,
                       const IntegratorOptions& opts = {});

/// Fixed-point iteration of w_l <- a_l - int_0^r K(r,s) next_l(s) ds on
/// successive subintervals of a uniform grid.
StackProfile picard_solve(const ProblemSpec& spec, std::span<const double> a, double r_end,
                          const IntegratorOptions& opts = {});

/// Relative defect of r^{N-1} w_l'(r) = -int_0^r s^{N-1} next_l(s) ds,
/// maximised over nodes and levels.
double residual(const ProblemSpec& spec, const StackProfile& profile);

}  // namespace polyshoot
