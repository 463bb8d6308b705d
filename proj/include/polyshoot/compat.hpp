#pragma once

#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "json.hpp"
#include "polyshoot/model.hpp"

namespace polyshoot::compat {

using Rational = boost::multiprecision::cpp_rational;

struct Complex {
  Rational re;
  Rational im;

  Complex() = default;
  Complex(Rational r, Rational i = 0) : re(std::move(r)), im(std::move(i)) {}

  bool is_zero() const { return re == 0 && im == 0; }
  friend bool operator==(const Complex& a, const Complex& b) { return a.re == b.re && a.im == b.im; }
  friend Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
  friend Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }
  friend Complex operator*(const Complex& a, const Complex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  /// Throws DomainError on division by zero.
  friend Complex operator/(const Complex& a, const Complex& b);
};

/// "a/b+c/d*i" (integers without denominator).
std::string to_string(const Complex& c);
Complex complex_from_string(const std::string& s);

/// Polynomial in t with ascending complex-rational coefficients and no
/// trailing zeros (the zero polynomial is empty).
class CPoly {
 public:
  CPoly() = default;
  explicit CPoly(std::vector<Complex> coeffs);

  /// c t^k
  static CPoly monomial(Complex c, int k);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<Complex>& coefficients() const { return c_; }
  /// Coefficient of t^k (zero beyond the degree).
  Complex operator[](int k) const;

  friend CPoly operator+(const CPoly& a, const CPoly& b);
  friend CPoly operator-(const CPoly& a, const CPoly& b);
  friend CPoly operator*(const CPoly& a, const CPoly& b);
  friend bool operator==(const CPoly& a, const CPoly& b) { return a.c_ == b.c_; }

 private:
  void normalize();
  std::vector<Complex> c_;
};

/// Human-readable form, highest degree first, e.g. "4i t^3 + 6 t^2 - 4i t".
std::string to_pretty(const CPoly& p);

/// (t - i)^alpha
CPoly modulus(int alpha);

/// Remainder of p on division by (t - i)^alpha; degree < alpha.
CPoly poly_rem(const CPoly& p, int alpha);

enum class SymbolConvention {
  /// Delta^j -> t^{2j} + 1, which reproduces the worked alpha = 4 case.
  Paper,
  /// Delta^j -> (t^2 + 1)^j, the principal symbol at |tau| = 1.
  Standard,
};

/// Symbol of Delta^j at tau + t nu with |tau| = 1.
CPoly laplacian_symbol(int j, SymbolConvention conv = SymbolConvention::Paper);

/// Dirichlet: t^k; Navier: Delta^k; natural: Delta^{2k}, t Delta^{2k}
/// alternately; alpha entries each.
std::vector<CPoly> boundary_symbols(BoundaryKind bc, int alpha, SymbolConvention conv = SymbolConvention::Paper);

/// Rank of the rows by exact Gaussian elimination.
int rank(std::vector<std::vector<Complex>> rows);

struct ComplementingReport {
  int alpha = 0;
  std::vector<CPoly> symbols;
  std::vector<CPoly> remainders;
  int rank = 0;
  bool independent = false;
};

ComplementingReport complementing_check(const std::vector<CPoly>& symbols, int alpha);
ComplementingReport complementing_check(BoundaryKind bc, int alpha, SymbolConvention conv = SymbolConvention::Paper);

nlohmann::json to_json(const CPoly& p);
nlohmann::json to_json(const ComplementingReport& r);

}  // namespace polyshoot::compat
