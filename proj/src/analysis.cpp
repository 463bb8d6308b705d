#include "polyshoot/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "polyshoot/errors.hpp"
#include "polyshoot/exponents.hpp"

namespace polyshoot::analysis {

namespace {

double sup_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

int sign_of(double v, double delta) {
  if (v > delta) return 1;
  if (v < -delta) return -1;
  return 0;
}

// Delta^s u_j = (-1)^s w_{j,s}
std::vector<double> laplacian_power(const StackProfile& p, int chain, int s, bool derivative) {
  std::vector<double> out = derivative ? p.dlevel(chain, s) : p.level(chain, s);
  if (s % 2 == 1)
    for (double& v : out) v = -v;
  return out;
}

}  // namespace

HopfReport hopf_check(const SolutionRecord& record, int chain) {
  const StackProfile& p = record.profile;
  HopfReport rep;
  rep.chain = chain;
  rep.alpha = p.spec.alphas.at(chain);
  if (sup_abs(p.level(chain, 0)) < 1e-8) {
    rep.non_solution = true;
    rep.quantity = "NonSolution";
    return rep;
  }
  const std::size_t last = p.grid.size() - 1;
  if (rep.alpha % 2 == 0) {
    const int s = rep.alpha / 2;
    const auto f = laplacian_power(p, chain, s, false);
    rep.quantity = "Delta^" + std::to_string(s) + " u(1)";
    rep.value = f[last];
    rep.margin = 1e-8 * sup_abs(f);
  } else {
    const int s = (rep.alpha - 1) / 2;
    const auto df = laplacian_power(p, chain, s, true);
    const auto f = laplacian_power(p, chain, s, false);
    rep.quantity = "-(Delta^" + std::to_string(s) + " u)'(1)";
    rep.value = -df[last];
    rep.margin = 1e-8 * std::max(sup_abs(f), sup_abs(df));
  }
  rep.pass = rep.value > rep.margin;
  return rep;
}

MonotonicityReport monotonicity_check(const SolutionRecord& record, int chain, double tol) {
  const StackProfile& p = record.profile;
  const auto& u = p.level(chain, 0);
  const auto& du = p.dlevel(chain, 0);
  const double scale = sup_abs(u);
  MonotonicityReport rep;
  if (!(scale > 0.0)) return rep;
  const std::size_t last = p.grid.size() - 1;
  rep.positive = true;
  rep.decreasing = true;
  rep.worst_value = u[0] / scale;
  rep.worst_derivative = du[0] / scale;
  if (std::abs(du[0]) > tol * scale) rep.decreasing = false;
  for (std::size_t i = 0; i < last; ++i) {
    rep.worst_value = std::min(rep.worst_value, u[i] / scale);
    if (!(u[i] > 0.0)) rep.positive = false;
    if (i > 0) {
      rep.worst_derivative = std::max(rep.worst_derivative, du[i] / scale);
      if (!(du[i] < 0.0)) rep.decreasing = false;
    }
  }
  return rep;
}

ExpectedShape expected_shape(int alpha, int s) {
  if (alpha < 2 || s < 1 || s >= alpha) throw DomainError("shape prediction needs alpha >= 2 and 1 <= s < alpha");
  ExpectedShape e;
  // boundary-vanishing levels: s <= alpha/2 - 1 (even), s <= (alpha-1)/2 (odd)
  const int vanishing = alpha % 2 == 0 ? alpha / 2 - 1 : (alpha - 1) / 2;
  if (s <= vanishing) {
    e.zeros = s + 1;
    e.critical = s;
    e.boundary_sign = 0;
  } else {
    e.zeros = alpha - s;
    e.critical = alpha - s - 1;
    e.boundary_sign = alpha % 2 == 0 ? 1 : -1;
  }
  if (alpha % 2 == 0)
    e.boundary_derivative = s <= alpha / 2 - 1 ? 0 : 1;
  else
    e.boundary_derivative = 2 * s <= alpha - 3 ? 0 : -1;
  return e;
}

ShapeReport shape_report(const SolutionRecord& record, ZeroTolerance tol) {
  const StackProfile& p = record.profile;
  if (p.spec.bc != BoundaryKind::Dirichlet || p.spec.m() != 1)
    throw DomainError("shape report needs a single Dirichlet equation");
  ShapeReport rep;
  rep.alpha = p.spec.alphas[0];
  if (rep.alpha < 2) throw DomainError("shape report needs alpha >= 2");
  const auto& r = p.grid.nodes();
  const std::size_t last = r.size() - 1;
  rep.pass = true;
  for (int s = rep.alpha - 1; s >= 1; --s) {
    LevelShape ls;
    ls.s = s;
    const auto f = laplacian_power(p, 0, s, false);
    const auto df = laplacian_power(p, 0, s, true);
    const ZeroCount zc = count_zeros(r, f, tol);
    const ZeroCount cc = count_critical_points(r, df, tol);
    ls.zeros_interior = zc.interior;
    ls.zero_at_boundary = zc.endpoint;
    ls.zeros_inclusive = zc.inclusive();
    ls.critical_points = cc.interior;
    const double fd = tol.abs + tol.rel * sup_abs(f);
    const double dd = tol.abs + tol.rel * sup_abs(df);
    ls.origin_sign = sign_of(f[0], fd);
    ls.boundary_sign = sign_of(f[last], fd);
    ls.boundary_derivative_sign = sign_of(df[last], dd);

    const ExpectedShape e = expected_shape(rep.alpha, s);
    ls.expected_zeros = e.zeros;
    ls.expected_critical = e.critical;
    ls.expected_origin_sign = s % 2 == 1 ? -1 : 1;
    ls.expected_boundary_sign = e.boundary_sign;
    ls.expected_boundary_derivative = e.boundary_derivative;

    ls.zeros_ok = ls.zeros_inclusive == e.zeros;
    ls.critical_ok = ls.critical_points == e.critical;
    const bool deriv_ok = e.boundary_derivative == 0 ? ls.boundary_derivative_sign == 0
                                                      : ls.boundary_derivative_sign != -e.boundary_derivative;
    ls.signs_ok = ls.origin_sign == ls.expected_origin_sign && ls.boundary_sign == e.boundary_sign && deriv_ok;
    rep.pass = rep.pass && ls.zeros_ok && ls.critical_ok && ls.signs_ok;
    rep.levels.push_back(ls);
  }
  return rep;
}

NormalizedPair normalize_pair(const StackProfile& u, const StackProfile& w) {
  if (u.spec.alphas != w.spec.alphas || u.spec.exponents != w.spec.exponents || u.spec.dimension != w.spec.dimension)
    throw DomainError("normalize_pair needs two solutions of the same problem");
  const double u0 = u.level(0, 0).front();
  const double w0 = w.level(0, 0).front();
  if (!(u0 > 0.0) || !(w0 > 0.0)) throw DegenerateScaling("normalize_pair needs u(0) > 0 and w(0) > 0");
  const double s = exponents::scaling_exponents(u.spec).front();
  if (!(s > 0.0) || !std::isfinite(s)) throw DegenerateScaling("scaling exponent must be positive");
  NormalizedPair out;
  out.lambda = std::pow(u0 / w0, 1.0 / s);
  if (!(out.lambda > 0.0) || !std::isfinite(out.lambda)) throw DegenerateScaling("degenerate scaling factor");
  const StackProfile wt = rescale(w, out.lambda);
  const double radius = std::min(u.radius(), wt.radius());
  const int intervals = static_cast<int>(u.grid.size()) - 1;
  const RadialGrid grid = RadialGrid::uniform(radius, intervals);
  auto resample = [&](const StackProfile& src) {
    StackProfile p;
    p.spec = src.spec;
    p.grid = grid;
    p.values.assign(src.values.size(), std::vector<double>(grid.size()));
    p.dvalues.assign(src.values.size(), std::vector<double>(grid.size()));
    for (std::size_t l = 0; l < src.values.size(); ++l)
      for (std::size_t i = 0; i < grid.size(); ++i) {
        p.values[l][i] = sample_level(src, static_cast<int>(l), grid[i]);
        p.dvalues[l][i] = sample_dlevel(src, static_cast<int>(l), grid[i]);
      }
    // the origin value is exact; w~(0) = u(0) by construction
    for (std::size_t l = 0; l < src.values.size(); ++l) p.values[l][0] = src.values[l][0];
    return p;
  };
  out.u = resample(u);
  out.w_tilde = resample(wt);
  out.w_tilde.values[0][0] = out.u.values[0][0];
  return out;
}

NormalizedPair normalize_pair(const SolutionRecord& u, const SolutionRecord& w) {
  return normalize_pair(u.profile, w.profile);
}

SolutionRecord perturbed_record(const SolutionRecord& base, std::span<const double> delta,
                                const IntegratorOptions& opts) {
  std::vector<double> a = base.profile.origin_stack();
  if (delta.size() != a.size()) throw DomainError("perturbation has the wrong length");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += delta[i];
  IntegratorOptions o = opts;
  o.grid_intervals = static_cast<int>(base.profile.grid.size()) - 1;
  SolutionRecord rec;
  rec.profile = integrate(base.profile.spec, a, base.profile.radius(), o);
  rec.initial_stack = a;
  rec.shoot_radius = base.profile.radius();
  const auto bc = bc_residual(rec.profile);
  for (double v : bc) rec.bc_residual_norm = std::max(rec.bc_residual_norm, std::abs(v));
  rec.ode_defect_norm = residual(rec.profile.spec, rec.profile);
  return rec;
}

std::vector<std::vector<int>> SignTable::transitions() const {
  std::vector<std::vector<int>> out;
  for (const auto& row : rows)
    if (row.kind != RowKind::Endpoint) out.push_back(row.signs);
  return out;
}

SignTable sign_table_from_columns(std::span<const double> r, const std::vector<std::vector<double>>& columns,
                                  std::vector<std::string> names, ZeroTolerance tol) {
  SignTable t;
  t.columns = std::move(names);
  const std::size_t ncol = columns.size();
  if (t.columns.size() != ncol) throw DomainError("one name per column required");
  if (r.size() < 2) throw DomainError("sign table needs at least two nodes");
  for (const auto& c : columns)
    if (c.size() != r.size()) throw DomainError("column length differs from the grid");
  t.radius = r.back();
  const std::size_t last = r.size() - 1;

  std::vector<double> delta(ncol);
  bool all_zero = true;
  for (std::size_t c = 0; c < ncol; ++c) {
    const double m = sup_abs(columns[c]);
    delta[c] = tol.abs + tol.rel * m;
    if (m > tol.abs) all_zero = false;
  }
  t.column_zeros.assign(ncol, 0);
  if (all_zero) {
    t.degenerate = true;
    t.rows.push_back({RowKind::Origin, 0.0, 0.0, std::vector<int>(ncol, 0)});
    return t;
  }

  struct Hit {
    double x;
    std::size_t cell;
    int column;
  };
  std::vector<Hit> hits;
  for (std::size_t c = 0; c < ncol; ++c) {
    const ZeroCount zc = count_zeros(r, columns[c], tol);
    t.column_zeros[c] = zc.interior;
    for (std::size_t k = 0; k < zc.locations.size(); ++k)
      hits.push_back({zc.locations[k], zc.cells[k], static_cast<int>(c)});
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.x < b.x; });
  std::vector<std::size_t> cells;
  for (std::size_t i = 0; i < hits.size();) {
    std::size_t k = i;
    std::vector<int> cols;
    double x = 0.0;
    while (k < hits.size() && hits[k].cell == hits[i].cell) {
      cols.push_back(hits[k].column);
      x += hits[k].x;
      ++k;
    }
    std::sort(cols.begin(), cols.end());
    t.breakpoints.push_back(x / static_cast<double>(k - i));
    cells.push_back(hits[i].cell);
    if (cols.size() > 1) t.flagged.push_back(t.vanishing.size());
    t.vanishing.push_back(std::move(cols));
    i = k;
  }

  auto interval_signs = [&](double lo, double hi) {
    std::vector<int> s(ncol, 0);
    for (std::size_t c = 0; c < ncol; ++c) {
      double best = 0.0;
      for (std::size_t i = 0; i <= last; ++i)
        if (r[i] > lo && r[i] < hi && std::abs(columns[c][i]) > std::abs(best)) best = columns[c][i];
      if (best == 0.0) {
        // no node inside: linear interpolation at the midpoint
        const double mid = 0.5 * (lo + hi);
        const auto it = std::upper_bound(r.begin(), r.end(), mid);
        const std::size_t j = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - r.begin(), 1), last) - 1;
        const double th = (mid - r[j]) / (r[j + 1] - r[j]);
        best = (1.0 - th) * columns[c][j] + th * columns[c][j + 1];
      }
      s[c] = best > 0.0 ? 1 : best < 0.0 ? -1 : 0;
    }
    return s;
  };

  std::vector<int> origin(ncol);
  for (std::size_t c = 0; c < ncol; ++c) origin[c] = sign_of(columns[c][0], delta[c]);
  t.rows.push_back({RowKind::Origin, 0.0, 0.0, origin});
  double lo = 0.0;
  for (std::size_t b = 0; b <= t.breakpoints.size(); ++b) {
    const double hi = b < t.breakpoints.size() ? t.breakpoints[b] : t.radius;
    const std::vector<int> s = interval_signs(lo, hi);
    t.rows.push_back({RowKind::Interval, lo, hi, s});
    if (b < t.breakpoints.size()) {
      std::vector<int> at = s;
      for (int c : t.vanishing[b]) at[c] = 0;
      t.rows.push_back({RowKind::Breakpoint, hi, hi, at});
    }
    lo = hi;
  }
  std::vector<int> end(ncol);
  for (std::size_t c = 0; c < ncol; ++c) end[c] = sign_of(columns[c][last], delta[c]);
  t.rows.push_back({RowKind::Endpoint, t.radius, t.radius, end});

  if (t.breakpoints.size() >= 2) {
    t.min_gap = t.radius;
    bool shrinking = true;
    for (std::size_t i = 1; i < t.breakpoints.size(); ++i) {
      const double g = t.breakpoints[i] - t.breakpoints[i - 1];
      if (i >= 2 && !(g < t.breakpoints[i - 1] - t.breakpoints[i - 2])) shrinking = false;
      t.min_gap = std::min(t.min_gap, g);
    }
    if (shrinking && t.breakpoints.size() >= 4) t.accumulation_point = t.breakpoints.back();
  }
  return t;
}

SignTable sign_table(const NormalizedPair& pair, ZeroTolerance tol) {
  const ProblemSpec& spec = pair.u.spec;
  std::vector<std::vector<double>> cols;
  std::vector<std::string> names;
  const bool flip = spec.alphas[0] % 2 == 1;
  for (int j = 0; j < spec.m(); ++j) {
    const double block = (j > 0 && flip) ? -1.0 : 1.0;
    std::string sol, tilde;
    if (spec.m() <= 2) {
      sol = j == 0 ? "u" : "v";
      tilde = j == 0 ? "w~" : "z~";
    } else {
      sol = "u" + std::to_string(j + 1);
      tilde = "w" + std::to_string(j + 1) + "~";
    }
    const std::string diff = block < 0 ? "-" + sol + "+" + tilde : sol + "-" + tilde;
    for (int k = 0; k < spec.alphas[j]; ++k) {
      const auto& a = pair.u.level(j, k);
      const auto& b = pair.w_tilde.level(j, k);
      const double sgn = block * (k % 2 == 0 ? 1.0 : -1.0);
      std::vector<double> c(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) c[i] = sgn * (a[i] - b[i]);
      cols.push_back(std::move(c));
      names.push_back(k == 0 ? diff : k == 1 ? "Delta(" + diff + ")" : "Delta^" + std::to_string(k) + "(" + diff + ")");
    }
  }
  return sign_table_from_columns(pair.u.grid.nodes(), cols, std::move(names), tol);
}

namespace {

std::string sign_cell(int s) {
  if (s == 0) return "=0";
  return s > 0 ? ">0" : "<0";
}

std::string row_label(const SignRow& row, std::size_t& bp) {
  std::ostringstream os;
  os << std::setprecision(6);
  switch (row.kind) {
    case RowKind::Origin: return "s=0";
    case RowKind::Interval: {
      os << "s in (" << row.r_lo << ", " << row.r_hi << ")";
      return os.str();
    }
    case RowKind::Breakpoint: {
      os << "s=R" << ++bp << "=" << row.r_lo;
      return os.str();
    }
    case RowKind::Endpoint: {
      os << "s=" << row.r_lo << " (end)";
      return os.str();
    }
  }
  return "";
}

}  // namespace

std::string render_text(const SignTable& table) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header{""};
  header.insert(header.end(), table.columns.begin(), table.columns.end());
  cells.push_back(header);
  std::size_t bp = 0;
  for (const auto& row : table.rows) {
    std::vector<std::string> line{row_label(row, bp)};
    for (int s : row.signs) line.push_back(sign_cell(s));
    cells.push_back(std::move(line));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : cells)
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
  std::ostringstream os;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (std::size_t c = 0; c < cells[i].size(); ++c) {
      if (c == 1) os << " |";
      os << (c ? " " : "") << std::setw(static_cast<int>(width[c])) << (c ? std::right : std::left) << cells[i][c];
    }
    os << "\n";
    if (i == 0) os << std::string(width[0], '-') << "-+" << std::string(10 * table.columns.size(), '-') << "\n";
  }
  if (table.degenerate) os << "degenerate: all columns vanish identically\n";
  for (std::size_t f : table.flagged) os << "flagged: several columns vanish at R" << f + 1 << "\n";
  if (table.accumulation_point >= 0.0) os << "accumulation diagnostic: R* ~ " << table.accumulation_point << "\n";
  return os.str();
}

void write_csv(std::ostream& os, const SignTable& table) {
  os << "kind,r_lo,r_hi";
  for (const auto& c : table.columns) os << ",\"" << c << "\"";
  os << "\n";
  os << std::setprecision(17);
  for (const auto& row : table.rows) {
    const char* kind = row.kind == RowKind::Origin       ? "origin"
                       : row.kind == RowKind::Interval   ? "interval"
                       : row.kind == RowKind::Breakpoint ? "breakpoint"
                                                         : "endpoint";
    os << kind << "," << row.r_lo << "," << row.r_hi;
    for (int s : row.signs) os << "," << (s > 0 ? "+" : s < 0 ? "-" : "0");
    os << "\n";
  }
}

nlohmann::json to_json(const SignTable& table) {
  nlohmann::json j;
  j["columns"] = table.columns;
  j["radius"] = table.radius;
  j["breakpoints"] = table.breakpoints;
  j["vanishing"] = table.vanishing;
  j["flagged"] = table.flagged;
  j["column_zeros"] = table.column_zeros;
  j["degenerate"] = table.degenerate;
  j["min_gap"] = table.min_gap;
  if (table.accumulation_point >= 0.0) j["accumulation_point"] = table.accumulation_point;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    const char* kind = row.kind == RowKind::Origin       ? "origin"
                       : row.kind == RowKind::Interval   ? "interval"
                       : row.kind == RowKind::Breakpoint ? "breakpoint"
                                                         : "endpoint";
    rows.push_back({{"kind", kind}, {"r_lo", row.r_lo}, {"r_hi", row.r_hi}, {"signs", row.signs}});
  }
  j["rows"] = rows;
  return j;
}

ZeroCountReport zero_count_lemma_check(const SignTable& table, int alpha) {
  ZeroCountReport rep;
  if (table.degenerate || table.rows.empty()) {
    rep.skipped = true;
    return rep;
  }
  if (alpha < 2 || static_cast<int>(table.columns.size()) < alpha) return rep;
  rep.exploratory = alpha >= 5;
  const std::vector<int>& o = table.rows.front().signs;
  // (-Delta)^k(u - w~)(0) < 0 means column k has sign -(-1)^k
  bool tail = true;
  for (int k = 1; k < alpha; ++k) tail = tail && o[k] == (k % 2 == 0 ? -1 : 1);
  if (tail && o[0] == 0)
    rep.configuration = LemmaConfiguration::ZeroCount;
  else if (tail && o[0] == -1)
    rep.configuration = LemmaConfiguration::ZeroCountRemark;
  else
    return rep;
  rep.applicable = true;
  rep.n = table.column_zeros[0];
  rep.z = table.column_zeros[alpha - 1];
  rep.required = rep.configuration == LemmaConfiguration::ZeroCount ? rep.n + 1 : rep.n;
  rep.pass = rep.z >= rep.required;
  return rep;
}

UniquenessReport uniqueness_report(const ProblemSpec& spec, const ShootOptions& opts) {
  UniquenessReport rep;
  rep.spec = spec;
  rep.within_theorem = std::all_of(spec.alphas.begin(), spec.alphas.end(), [](int a) { return a <= 4; });
  rep.starts = std::max(opts.multistart_count, 0);
  MultistartResult ms = multistart(spec, opts);
  rep.converged = static_cast<int>(ms.records.size());
  for (const auto& o : ms.outcomes)
    if (!o.converged) rep.failures.push_back(o.failure);
  rep.clusters = cluster_solutions(ms.records);
  for (const auto& c : rep.clusters) rep.representatives.push_back(ms.records[c.representative]);
  for (std::size_t i = 0; i < rep.representatives.size(); ++i)
    for (std::size_t k = i + 1; k < rep.representatives.size(); ++k)
      rep.pairwise_distances.push_back(profile_distance(rep.representatives[i].profile, rep.representatives[k].profile));
  const bool single_dirichlet = spec.bc == BoundaryKind::Dirichlet && spec.m() == 1;
  for (const auto& r : rep.representatives) {
    rep.monotonicity.push_back(monotonicity_check(r));
    if (single_dirichlet) {
      rep.hopf.push_back(hopf_check(r));
      if (spec.alphas[0] >= 2) {
        try {
          rep.shape.push_back(shape_report(r));
        } catch (const ResolutionError&) {
          rep.shape.push_back(ShapeReport{spec.alphas[0], {}, false});
        }
      }
    }
  }
  return rep;
}

nlohmann::json to_json(const HopfReport& r) {
  return {{"chain", r.chain},   {"alpha", r.alpha},   {"quantity", r.quantity},
          {"value", r.value},   {"margin", r.margin}, {"pass", r.pass},
          {"non_solution", r.non_solution}};
}

nlohmann::json to_json(const ShapeReport& r) {
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& l : r.levels)
    levels.push_back({{"s", l.s},
                      {"zeros_interior", l.zeros_interior},
                      {"zero_at_boundary", l.zero_at_boundary},
                      {"zeros_inclusive", l.zeros_inclusive},
                      {"expected_zeros", l.expected_zeros},
                      {"critical_points", l.critical_points},
                      {"expected_critical", l.expected_critical},
                      {"origin_sign", l.origin_sign},
                      {"boundary_sign", l.boundary_sign},
                      {"expected_boundary_sign", l.expected_boundary_sign},
                      {"boundary_derivative_sign", l.boundary_derivative_sign},
                      {"expected_boundary_derivative", l.expected_boundary_derivative},
                      {"zeros_ok", l.zeros_ok},
                      {"critical_ok", l.critical_ok},
                      {"signs_ok", l.signs_ok}});
  return {{"alpha", r.alpha}, {"levels", levels}, {"pass", r.pass}};
}

nlohmann::json to_json(const MonotonicityReport& r) {
  return {{"positive", r.positive},
          {"decreasing", r.decreasing},
          {"worst_value", r.worst_value},
          {"worst_derivative", r.worst_derivative},
          {"pass", r.pass()}};
}

nlohmann::json to_json(const ZeroCountReport& r) {
  const char* cfg = r.configuration == LemmaConfiguration::ZeroCount         ? "zero-count"
                    : r.configuration == LemmaConfiguration::ZeroCountRemark ? "zero-count-remark"
                                                                             : "none";
  return {{"configuration", cfg}, {"n", r.n},
          {"z", r.z},             {"required", r.required},
          {"applicable", r.applicable}, {"exploratory", r.exploratory},
          {"skipped", r.skipped}, {"pass", r.pass}};
}

nlohmann::json to_json(const UniquenessReport& r) {
  nlohmann::json j;
  j["spec"] = polyshoot::to_json(r.spec);
  j["within_theorem"] = r.within_theorem;
  j["starts"] = r.starts;
  j["converged"] = r.converged;
  j["clusters"] = r.clusters.size();
  j["pairwise_distances"] = r.pairwise_distances;
  j["failures"] = r.failures;
  nlohmann::json per = nlohmann::json::array();
  for (std::size_t i = 0; i < r.representatives.size(); ++i) {
    nlohmann::json c;
    c["members"] = r.clusters[i].members.size();
    c["shoot_radius"] = r.representatives[i].shoot_radius;
    c["initial_stack"] = r.representatives[i].initial_stack;
    c["bc_residual_norm"] = r.representatives[i].bc_residual_norm;
    c["monotonicity"] = to_json(r.monotonicity[i]);
    if (i < r.hopf.size()) c["hopf"] = to_json(r.hopf[i]);
    if (i < r.shape.size()) c["shape"] = to_json(r.shape[i]);
    per.push_back(c);
  }
  j["per_cluster"] = per;
  return j;
}

}  // namespace polyshoot::analysis
