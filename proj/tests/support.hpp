#pragma once

// Test-only generators and oracles. Oracles here avoid the library's own
// algorithms: expansion is checked by interpolation, shifts by Taylor
// coefficients, orbits by exact iteration.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "heightkit/poly.hpp"

namespace testkit {

using heightkit::Integer;
using heightkit::IntPoly;
using heightkit::Rational;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  long range(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

  /// Degree exactly `degree`, coefficients in [-bound, bound], nonzero leading coefficient.
  IntPoly poly(int degree, long bound) {
    std::vector<Integer> c(static_cast<std::size_t>(degree) + 1);
    for (auto& x : c) x = range(-bound, bound);
    while (c.back() == 0) c.back() = range(-bound, bound);
    return IntPoly(std::move(c));
  }

  /// Primitive polynomial with degree in [1, max_degree].
  IntPoly primitive_poly(int max_degree, long bound) {
    for (;;) {
      IntPoly p = poly(static_cast<int>(range(1, max_degree)), bound);
      if (heightkit::is_primitive(p)) return p;
    }
  }

  Rational rational(long num_bound, long den_bound) {
    const long den = range(1, den_bound);
    return heightkit::make_rational(Integer(range(-num_bound, num_bound)), Integer(den));
  }

 private:
  std::mt19937_64 rng_;
};

/// Coefficients of the unique polynomial of degree < points.size() through (x_i, y_i), via divided differences.
inline std::vector<Rational> interpolate(const std::vector<Rational>& xs, const std::vector<Rational>& ys) {
  const std::size_t n = xs.size();
  std::vector<Rational> dd = ys;
  for (std::size_t j = 1; j < n; ++j) {
    for (std::size_t i = n - 1; i >= j; --i) {
      dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - j]);
      if (i == j) break;
    }
  }
  // Expand the Newton form into monomial coefficients.
  std::vector<Rational> coeffs(n, Rational(0));
  std::vector<Rational> basis{Rational(1)};
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < basis.size(); ++k) coeffs[k] += dd[j] * basis[k];
    std::vector<Rational> next(basis.size() + 1, Rational(0));
    for (std::size_t k = 0; k < basis.size(); ++k) {
      next[k + 1] += basis[k];
      next[k] -= xs[j] * basis[k];
    }
    basis = std::move(next);
  }
  return coeffs;
}

/// k-th Taylor coefficient P^{(k)}(a)/k!, by direct binomial sums.
inline Rational taylor_coefficient(const IntPoly& p, const Rational& a, std::size_t k) {
  Rational sum = 0;
  for (std::size_t i = k; i < p.coeffs().size(); ++i) {
    Integer binom;
    mpz_bin_uiui(binom.get_mpz_t(), i, k);
    Rational power = 1;
    for (std::size_t j = 0; j < i - k; ++j) power *= a;
    sum += Rational(p.coeffs()[i] * binom) * power;
  }
  return sum;
}

/// Weil height of a rational number: log max(|num|, den).
inline double rational_height(const Rational& x) {
  const Integer num = abs(x.get_num());
  const Integer& den = x.get_den();
  const Integer& big = num > den ? num : den;
  // log of a big integer via its mantissa and exponent.
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, big.get_mpz_t());
  return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
}

}  // namespace testkit
