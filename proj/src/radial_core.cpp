#include "polyshoot/radial_core.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <istream>
#include <ostream>
#include <string>

#include "polyshoot/errors.hpp"
#include "polyshoot/exponents.hpp"

namespace polyshoot {

RadialGrid::RadialGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2) throw DomainError("radial grid needs at least two nodes");
  if (nodes_.front() != 0.0) throw DomainError("radial grid must start at r = 0");
  for (std::size_t i = 1; i < nodes_.size(); ++i)
    if (!(nodes_[i] > nodes_[i - 1])) throw DomainError("radial grid nodes must be strictly increasing");
}

RadialGrid RadialGrid::uniform(double radius, int intervals) {
  if (!(radius > 0.0) || intervals < 1) throw DomainError("uniform grid needs R > 0 and at least one interval");
  std::vector<double> nodes(static_cast<std::size_t>(intervals) + 1);
  for (int i = 0; i <= intervals; ++i) nodes[i] = radius * static_cast<double>(i) / intervals;
  nodes.back() = radius;
  return RadialGrid(std::move(nodes));
}

std::vector<double> StackProfile::origin_stack() const {
  std::vector<double> a(values.size());
  for (std::size_t l = 0; l < values.size(); ++l) a[l] = values[l].front();
  return a;
}

double StackProfile::scale() const {
  double s = 0.0;
  for (const auto& lv : values)
    for (double v : lv) s = std::max(s, std::abs(v));
  return s;
}

double kernel(int dimension, double r, double s) {
  if (dimension < 3) throw DomainError("kernel needs N >= 3");
  if (s < 0.0 || s > r) throw DomainError("kernel needs 0 <= s <= r");
  if (r == 0.0) return 0.0;
  return s * (1.0 - std::pow(s / r, dimension - 2)) / (dimension - 2);
}

std::vector<double> boundary_derivatives(const StackProfile& profile, int chain, int max_order) {
  const int alpha = profile.spec.alphas.at(chain);
  const double n = profile.spec.dimension;
  const double radius = profile.radius();
  const std::size_t last = profile.grid.size() - 1;
  if (!(radius > 0.0)) throw DomainError("boundary derivatives need R > 0");

  std::map<std::pair<int, int>, double> memo;
  // derivative `order` of stack level `lv` at R
  auto deriv = [&](auto&& self, int lv, int order) -> double {
    if (lv >= alpha)
      throw NeedsRHS("derivative of order " + std::to_string(max_order) + " needs the right-hand side of chain " +
                     std::to_string(chain + 1));
    if (order == 0) return profile.level(chain, lv)[last];
    if (order == 1) return profile.dlevel(chain, lv)[last];
    const auto key = std::make_pair(lv, order);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const int mm = order - 2;
    double sum = 0.0;
    double binom = 1.0;
    double fact = 1.0;
    for (int i = 0; i <= mm; ++i) {
      if (i > 0) {
        binom = binom * (mm - i + 1) / i;
        fact *= i;
      }
      const double sign = (i % 2 == 0) ? 1.0 : -1.0;
      sum += binom * sign * fact * std::pow(radius, -1.0 - i) * self(self, lv, mm + 1 - i);
    }
    // Delta w_lv = -w_{lv+1}
    const double value = -self(self, lv + 1, mm) - (n - 1.0) * sum;
    memo.emplace(key, value);
    return value;
  };

  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(max_order) + 1);
  for (int k = 0; k <= max_order; ++k) out.push_back(deriv(deriv, 0, k));
  return out;
}

std::vector<double> boundary_derivatives(const StackProfile& profile, int chain) {
  return boundary_derivatives(profile, chain, profile.spec.alphas.at(chain) - 1);
}

namespace {

// Root of the quadratic through three samples inside [lo, hi]; linear fallback.
double locate_root(std::span<const double> r, std::span<const double> f, std::size_t j) {
  const std::size_t n = r.size();
  const double lo = r[j], hi = r[j + 1];
  const double linear = lo + (hi - lo) * f[j] / (f[j] - f[j + 1]);
  if (n < 3) return linear;
  const std::size_t i0 = (j == 0) ? 0 : (j + 1 >= n - 1 ? n - 3 : j - 1);
  const double x0 = r[i0], x1 = r[i0 + 1], x2 = r[i0 + 2];
  const double y0 = f[i0], y1 = f[i0 + 1], y2 = f[i0 + 2];
  // Newton form p(x) = y0 + c1 (x - x0) + c2 (x - x0)(x - x1)
  const double c1 = (y1 - y0) / (x1 - x0);
  const double c2 = ((y2 - y1) / (x2 - x1) - c1) / (x2 - x0);
  // expand to a x^2 + b x + c
  const double a = c2;
  const double b = c1 - c2 * (x0 + x1);
  const double c = y0 - c1 * x0 + c2 * x0 * x1;
  const double width = hi - lo;
  if (std::abs(a) * width * width < 1e-14 * (std::abs(b) * width + std::abs(c))) return linear;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return linear;
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (b + std::copysign(sq, b));
  double roots[2] = {q / a, q != 0.0 ? c / q : q / a};
  const double slack = 1e-9 * width;
  int inside = 0;
  double found = linear;
  for (double x : roots) {
    if (x >= lo - slack && x <= hi + slack) {
      ++inside;
      found = std::clamp(x, lo, hi);
    }
  }
  if (inside == 2 && std::abs(roots[0] - roots[1]) > slack)
    throw ResolutionError("two zeros inside the grid cell [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return inside == 0 ? linear : found;
}

}  // namespace

ZeroCount count_zeros(std::span<const double> r, std::span<const double> f, ZeroTolerance tol) {
  if (r.size() != f.size()) throw DomainError("count_zeros: sample size mismatch");
  ZeroCount out;
  if (f.empty()) return out;
  double fmax = 0.0;
  for (double v : f) fmax = std::max(fmax, std::abs(v));
  const double delta = tol.abs + tol.rel * fmax;

  int state = 0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const int s = f[i] > delta ? 1 : (f[i] < -delta ? -1 : 0);
    if (s == 0) continue;
    if (state != 0 && s != state) {
      // first raw sign change after the last confirmed node
      std::size_t k = last;
      while (k + 1 < i && f[k + 1] * state > 0.0) ++k;
      if (f[k + 1] == 0.0) {
        out.locations.push_back(r[k + 1]);
      } else {
        out.locations.push_back(locate_root(r, f, k));
      }
      out.cells.push_back(k);
      if (out.cells.size() >= 2 && out.cells[out.cells.size() - 1] < out.cells[out.cells.size() - 2] + 3)
        throw ResolutionError("zeros closer than three grid nodes near r = " + std::to_string(out.locations.back()));
      ++out.interior;
    }
    state = s;
    last = i;
  }
  out.endpoint = std::abs(f.back()) < delta;
  return out;
}

ZeroCount count_critical_points(std::span<const double> r, std::span<const double> df, ZeroTolerance tol) {
  ZeroCount zc = count_zeros(r, df, tol);
  zc.endpoint = false;
  return zc;
}

StackProfile rescale(const StackProfile& profile, double lambda) {
  if (!profile.spec.pure_power()) throw DomainError("rescaling needs a pure-power right-hand side");
  if (!(lambda > 0.0)) throw DomainError("rescale factor must be positive");
  const auto s = exponents::scaling_exponents(profile.spec);
  StackProfile out;
  out.spec = profile.spec;
  std::vector<double> nodes = profile.grid.nodes();
  for (double& x : nodes) x /= lambda;
  out.grid = RadialGrid(std::move(nodes));
  out.values = profile.values;
  out.dvalues = profile.dvalues;
  for (int j = 0; j < profile.spec.m(); ++j) {
    for (int k = 0; k < profile.spec.alphas[j]; ++k) {
      const int l = profile.spec.level_index(j, k);
      const double fv = std::pow(lambda, s[j] + 2.0 * k);
      const double fd = fv * lambda;
      for (double& v : out.values[l]) v *= fv;
      for (double& v : out.dvalues[l]) v *= fd;
    }
  }
  return out;
}

StackProfile rescale_to_unit(const StackProfile& profile) { return rescale(profile, profile.radius()); }

namespace {

std::size_t find_cell(const RadialGrid& grid, double x) {
  const auto& nodes = grid.nodes();
  if (x <= nodes.front()) return 0;
  if (x >= nodes.back()) return nodes.size() - 2;
  auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
  return static_cast<std::size_t>(it - nodes.begin()) - 1;
}

}  // namespace

double sample_level(const StackProfile& profile, int level, double x) {
  const std::size_t i = find_cell(profile.grid, x);
  const double x0 = profile.grid[i], x1 = profile.grid[i + 1];
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  const auto& v = profile.values[level];
  const auto& d = profile.dvalues[level];
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
  const double h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t);
  const double h11 = t * t * (t - 1);
  return h00 * v[i] + h10 * h * d[i] + h01 * v[i + 1] + h11 * h * d[i + 1];
}

double sample_dlevel(const StackProfile& profile, int level, double x) {
  const std::size_t i = find_cell(profile.grid, x);
  const double x0 = profile.grid[i], x1 = profile.grid[i + 1];
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  const auto& v = profile.values[level];
  const auto& d = profile.dvalues[level];
  const double dh00 = 6 * t * t - 6 * t;
  const double dh10 = 3 * t * t - 4 * t + 1;
  const double dh01 = -6 * t * t + 6 * t;
  const double dh11 = 3 * t * t - 2 * t;
  return (dh00 * v[i] + dh01 * v[i + 1]) / h + dh10 * d[i] + dh11 * d[i + 1];
}

void write_csv(std::ostream& os, const StackProfile& profile) {
  const auto& spec = profile.spec;
  os << "r";
  for (int j = 0; j < spec.m(); ++j)
    for (int k = 0; k < spec.alphas[j]; ++k) os << ",w" << j + 1 << "_" << k;
  for (int j = 0; j < spec.m(); ++j)
    for (int k = 0; k < spec.alphas[j]; ++k) os << ",dw" << j + 1 << "_" << k;
  os << "\n" << std::setprecision(17);
  for (std::size_t i = 0; i < profile.grid.size(); ++i) {
    os << profile.grid[i];
    for (const auto& lv : profile.values) os << "," << lv[i];
    for (const auto& lv : profile.dvalues) os << "," << lv[i];
    os << "\n";
  }
}

StackProfile read_csv(std::istream& is, const ProblemSpec& spec) {
  const auto levels = static_cast<std::size_t>(spec.stack_size());
  std::string line;
  if (!std::getline(is, line)) throw ValidationError("empty profile CSV");
  if (static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) != 2 * levels)
    throw ValidationError("profile CSV header does not match the problem");
  StackProfile p;
  p.spec = spec;
  p.values.assign(levels, {});
  p.dvalues.assign(levels, {});
  std::vector<double> nodes;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t next = line.find(',', pos);
      if (next == std::string::npos) next = line.size();
      try {
        row.push_back(std::stod(line.substr(pos, next - pos)));
      } catch (const std::exception&) {
        throw ValidationError("malformed profile CSV row: " + line);
      }
      pos = next + 1;
    }
    if (row.size() != 2 * levels + 1) throw ValidationError("profile CSV row has the wrong width");
    nodes.push_back(row[0]);
    for (std::size_t l = 0; l < levels; ++l) {
      p.values[l].push_back(row[1 + l]);
      p.dvalues[l].push_back(row[1 + levels + l]);
    }
  }
  try {
    p.grid = RadialGrid(std::move(nodes));
  } catch (const DomainError& e) {
    throw ValidationError(std::string("profile CSV grid: ") + e.what());
  }
  return p;
}

}  // namespace polyshoot
