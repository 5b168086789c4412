#pragma once

// Exact integer and rational polynomials.
//
// Univariate polynomials are dense (ascending coefficient order); multivariate
// polynomials are sparse maps from exponent vectors to nonzero coefficients.
// All coefficients are arbitrary precision (GMP).

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace heightkit {

using Integer = mpz_class;
using Rational = mpq_class;

/// Builds num/den in lowest terms with a positive denominator. Throws DomainError if den == 0.
Rational make_rational(const Integer& num, const Integer& den);

/// Parses "a", "-a" or "a/b" with decimal integers.
Rational parse_rational(std::string_view text);

std::string to_string(const Integer& x);
std::string to_string(const Rational& x);

class IntPoly {
 public:
  IntPoly() = default;
  explicit IntPoly(std::vector<Integer> coeffs);
  IntPoly(std::initializer_list<long> coeffs);

  static IntPoly constant(const Integer& c);
  static IntPoly monomial(const Integer& c, std::size_t degree);

  const std::vector<Integer>& coeffs() const noexcept { return coeffs_; }
  bool is_zero() const noexcept { return coeffs_.empty(); }
  /// -1 for the zero polynomial.
  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  const Integer& leading() const;
  /// Coefficient of T^i; zero past the degree.
  Integer coeff(std::size_t i) const;
  /// Index of the first nonzero coefficient (multiplicity of the root 0).
  std::size_t low_order() const;

  IntPoly derivative() const;

  Integer eval(const Integer& x) const;
  Rational eval(const Rational& x) const;
  std::complex<double> eval(std::complex<double> z) const;
  std::complex<long double> eval(std::complex<long double> z) const;

  std::string to_string(std::string_view var = "T") const;

  friend IntPoly operator+(const IntPoly& a, const IntPoly& b);
  friend IntPoly operator-(const IntPoly& a, const IntPoly& b);
  friend IntPoly operator*(const IntPoly& a, const IntPoly& b);
  friend IntPoly operator*(const Integer& c, const IntPoly& a);
  friend IntPoly operator-(const IntPoly& a);
  friend bool operator==(const IntPoly& a, const IntPoly& b) = default;

 private:
  void trim();
  std::vector<Integer> coeffs_;
};

/// Polynomial with rational coefficients; produced by Taylor shifts of integer polynomials.
class RatPoly {
 public:
  RatPoly() = default;
  explicit RatPoly(std::vector<Rational> coeffs);
  explicit RatPoly(const IntPoly& p);

  const std::vector<Rational>& coeffs() const noexcept { return coeffs_; }
  bool is_zero() const noexcept { return coeffs_.empty(); }
  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  Rational coeff(std::size_t i) const;

  Rational eval(const Rational& x) const;
  std::string to_string(std::string_view var = "T") const;

  friend bool operator==(const RatPoly& a, const RatPoly& b) = default;

 private:
  void trim();
  std::vector<Rational> coeffs_;
};

/// P(T + a), exact.
RatPoly shift(const RatPoly& p, const Rational& a);
RatPoly shift(const IntPoly& p, const Rational& a);

/// Positive gcd of the coefficients; throws DomainError on the zero polynomial.
Integer content(const IntPoly& p);
/// p / content(p). The sign of p stays here.
IntPoly primitive_part(const IntPoly& p);
bool is_primitive(const IntPoly& p);

using Exponents = std::vector<unsigned>;

class MultiPoly {
 public:
  explicit MultiPoly(std::size_t nvars = 0) : nvars_(nvars) {}

  static MultiPoly constant(std::size_t nvars, const Integer& c);
  static MultiPoly variable(std::size_t nvars, std::size_t index);
  static MultiPoly from_univariate(const IntPoly& p);

  std::size_t nvars() const noexcept { return nvars_; }
  const std::map<Exponents, Integer>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  /// Adds c·x^e, merging with an existing term and dropping zeros.
  void add_term(const Exponents& e, const Integer& c);

  /// Largest total degree of a term; 0 for the zero polynomial.
  unsigned total_degree() const;
  bool is_homogeneous() const;

  /// Requires nvars() == 1.
  IntPoly to_univariate() const;

  std::complex<double> eval(std::span<const std::complex<double>> point) const;

  /// Renders with the given names (defaults to x0, x1, ...).
  std::string to_string(std::span<const std::string> vars = {}) const;

  MultiPoly pow(unsigned k) const;

  friend MultiPoly operator+(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator-(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator-(const MultiPoly& a);
  friend bool operator==(const MultiPoly& a, const MultiPoly& b) = default;

 private:
  std::size_t nvars_;
  std::map<Exponents, Integer> terms_;
};

Integer content(const MultiPoly& p);
MultiPoly primitive_part(const MultiPoly& p);

/// Homogenizes to degree m with a new variable inserted at index 0; throws if m is below some term's degree.
MultiPoly homogenize(const MultiPoly& f, unsigned m);
/// Sets variable `var` to 1 and removes it.
MultiPoly dehomogenize(const MultiPoly& f, std::size_t var);

}  // namespace heightkit
