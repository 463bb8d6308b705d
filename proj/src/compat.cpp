#include "polyshoot/compat.hpp"

#include <sstream>

#include "polyshoot/errors.hpp"

namespace polyshoot::compat {

Complex operator/(const Complex& a, const Complex& b) {
  Rational d = b.re * b.re + b.im * b.im;
  if (d == 0) throw DomainError("complex division by zero");
  return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}

std::string to_string(const Complex& c) {
  std::string im = c.im.str();
  if (im.front() != '-') im = "+" + im;
  return c.re.str() + im + "*i";
}

Complex complex_from_string(const std::string& s) {
  if (s.size() < 3 || s.substr(s.size() - 2) != "*i") throw ValidationError("bad complex rational: " + s);
  std::size_t split = s.find_last_of("+-", s.size() - 3);
  if (split == std::string::npos || split == 0) throw ValidationError("bad complex rational: " + s);
  try {
    Rational re(s.substr(0, split));
    std::string im = s.substr(split, s.size() - 2 - split);
    if (im.front() == '+') im.erase(0, 1);
    return {re, Rational(im)};
  } catch (const std::exception&) {
    throw ValidationError("bad complex rational: " + s);
  }
}

CPoly::CPoly(std::vector<Complex> coeffs) : c_(std::move(coeffs)) { normalize(); }

CPoly CPoly::monomial(Complex c, int k) {
  std::vector<Complex> v(static_cast<std::size_t>(k) + 1);
  v.back() = std::move(c);
  return CPoly(std::move(v));
}

void CPoly::normalize() {
  while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

Complex CPoly::operator[](int k) const {
  if (k < 0 || k > degree()) return {};
  return c_[static_cast<std::size_t>(k)];
}

CPoly operator+(const CPoly& a, const CPoly& b) {
  std::vector<Complex> v(std::max(a.c_.size(), b.c_.size()));
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = a[static_cast<int>(k)] + b[static_cast<int>(k)];
  return CPoly(std::move(v));
}

CPoly operator-(const CPoly& a, const CPoly& b) {
  std::vector<Complex> v(std::max(a.c_.size(), b.c_.size()));
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = a[static_cast<int>(k)] - b[static_cast<int>(k)];
  return CPoly(std::move(v));
}

CPoly operator*(const CPoly& a, const CPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Complex> v(a.c_.size() + b.c_.size() - 1);
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) v[i + j] = v[i + j] + a.c_[i] * b.c_[j];
  return CPoly(std::move(v));
}

namespace {

std::string coeff_text(const Complex& c, bool& negative) {
  // Pure real or pure imaginary coefficients print without parentheses.
  negative = false;
  if (c.im == 0) {
    negative = c.re < 0;
    Rational a = negative ? Rational(-c.re) : c.re;
    return a.str();
  }
  if (c.re == 0) {
    negative = c.im < 0;
    Rational a = negative ? Rational(-c.im) : c.im;
    return (a == 1 ? std::string() : a.str()) + "i";
  }
  std::string im = c.im.str();
  return "(" + c.re.str() + (c.im < 0 ? " - " + Rational(-c.im).str() : " + " + im) + "i)";
}

}  // namespace

std::string to_pretty(const CPoly& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int k = p.degree(); k >= 0; --k) {
    const Complex& c = p.coefficients()[static_cast<std::size_t>(k)];
    if (c.is_zero()) continue;
    bool neg = false;
    std::string txt = coeff_text(c, neg);
    if (first) {
      if (neg) os << "-";
    } else {
      os << (neg ? " - " : " + ");
    }
    first = false;
    bool unit = (txt == "1");
    if (k == 0) {
      os << txt;
    } else {
      if (!unit) os << txt << " ";
      os << "t";
      if (k > 1) os << "^" << k;
    }
  }
  return os.str();
}

CPoly modulus(int alpha) {
  CPoly factor(std::vector<Complex>{Complex(0, -1), Complex(1)});
  CPoly m(std::vector<Complex>{Complex(1)});
  for (int k = 0; k < alpha; ++k) m = m * factor;
  return m;
}

CPoly poly_rem(const CPoly& p, int alpha) {
  if (alpha < 1) throw ValidationError("poly_rem requires alpha >= 1");
  CPoly m = modulus(alpha);
  std::vector<Complex> r = p.coefficients();
  // m is monic of degree alpha.
  for (int d = static_cast<int>(r.size()) - 1; d >= alpha; --d) {
    Complex lead = r[static_cast<std::size_t>(d)];
    if (lead.is_zero()) continue;
    for (int k = 0; k <= alpha; ++k) {
      auto idx = static_cast<std::size_t>(d - alpha + k);
      r[idx] = r[idx] - lead * m.coefficients()[static_cast<std::size_t>(k)];
    }
  }
  if (r.size() > static_cast<std::size_t>(alpha)) r.resize(static_cast<std::size_t>(alpha));
  return CPoly(std::move(r));
}

CPoly laplacian_symbol(int j, SymbolConvention conv) {
  if (j < 0) throw ValidationError("negative Laplacian power");
  if (j == 0) return CPoly::monomial(Complex(1), 0);
  if (conv == SymbolConvention::Paper) return CPoly::monomial(Complex(1), 2 * j) + CPoly::monomial(Complex(1), 0);
  CPoly base(std::vector<Complex>{Complex(1), Complex(0), Complex(1)});
  CPoly s = base;
  for (int k = 1; k < j; ++k) s = s * base;
  return s;
}

std::vector<CPoly> boundary_symbols(BoundaryKind bc, int alpha, SymbolConvention conv) {
  if (alpha < 1) throw ValidationError("alpha must be >= 1");
  std::vector<CPoly> out;
  out.reserve(static_cast<std::size_t>(alpha));
  const CPoly t = CPoly::monomial(Complex(1), 1);
  switch (bc) {
    case BoundaryKind::Dirichlet:
      for (int k = 0; k < alpha; ++k) out.push_back(CPoly::monomial(Complex(1), k));
      break;
    case BoundaryKind::Navier:
      for (int k = 0; k < alpha; ++k) out.push_back(laplacian_symbol(k, conv));
      break;
    case BoundaryKind::Natural:
      for (int k = 0; static_cast<int>(out.size()) < alpha; ++k) {
        CPoly s = laplacian_symbol(2 * k, conv);
        out.push_back(s);
        if (static_cast<int>(out.size()) < alpha) out.push_back(t * s);
      }
      break;
    default:
      throw UnsupportedBoundaryKind("unsupported boundary kind");
  }
  return out;
}

int rank(std::vector<std::vector<Complex>> rows) {
  if (rows.empty()) return 0;
  std::size_t cols = 0;
  for (const auto& r : rows) cols = std::max(cols, r.size());
  for (auto& r : rows) r.resize(cols);
  int rk = 0;
  for (std::size_t c = 0; c < cols && rk < static_cast<int>(rows.size()); ++c) {
    std::size_t piv = static_cast<std::size_t>(rk);
    while (piv < rows.size() && rows[piv][c].is_zero()) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[static_cast<std::size_t>(rk)]);
    const auto& prow = rows[static_cast<std::size_t>(rk)];
    for (std::size_t i = static_cast<std::size_t>(rk) + 1; i < rows.size(); ++i) {
      if (rows[i][c].is_zero()) continue;
      Complex f = rows[i][c] / prow[c];
      for (std::size_t k = c; k < cols; ++k) rows[i][k] = rows[i][k] - f * prow[k];
    }
    ++rk;
  }
  return rk;
}

ComplementingReport complementing_check(const std::vector<CPoly>& symbols, int alpha) {
  ComplementingReport rep;
  rep.alpha = alpha;
  rep.symbols = symbols;
  std::vector<std::vector<Complex>> rows;
  for (const auto& s : symbols) {
    rep.remainders.push_back(poly_rem(s, alpha));
    std::vector<Complex> row(static_cast<std::size_t>(alpha));
    for (int k = 0; k < alpha; ++k) row[static_cast<std::size_t>(k)] = rep.remainders.back()[k];
    rows.push_back(std::move(row));
  }
  rep.rank = rank(std::move(rows));
  rep.independent = rep.rank == alpha;
  return rep;
}

ComplementingReport complementing_check(BoundaryKind bc, int alpha, SymbolConvention conv) {
  return complementing_check(boundary_symbols(bc, alpha, conv), alpha);
}

nlohmann::json to_json(const CPoly& p) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& c : p.coefficients()) j.push_back(to_string(c));
  return j;
}

nlohmann::json to_json(const ComplementingReport& r) {
  nlohmann::json j;
  j["alpha"] = r.alpha;
  j["symbols"] = nlohmann::json::array();
  j["remainders"] = nlohmann::json::array();
  j["symbols_text"] = nlohmann::json::array();
  j["remainders_text"] = nlohmann::json::array();
  for (const auto& s : r.symbols) {
    j["symbols"].push_back(to_json(s));
    j["symbols_text"].push_back(to_pretty(s));
  }
  for (const auto& s : r.remainders) {
    j["remainders"].push_back(to_json(s));
    j["remainders_text"].push_back(to_pretty(s));
  }
  j["rank"] = r.rank;
  j["independent"] = r.independent;
  return j;
}

}  // namespace polyshoot::compat
