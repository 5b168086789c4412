#pragma once

// Exact p-adic local computations. Every result is a rational multiple of
// log p; conversion to a real happens only in LocalValue::to_double().

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "heightkit/poly.hpp"

namespace heightkit {

/// Trial-division bound used for primality checks and prime enumeration.
inline constexpr std::uint64_t kTrialDivisionBound = 1'000'000;

/// A prime number. `verified` is false when trial division up to the bound could not decide.
class Prime {
 public:
  /// Throws DomainError if `value` is provably composite or < 2.
  static Prime checked(std::uint64_t value, std::uint64_t bound = kTrialDivisionBound);

  std::uint64_t value() const noexcept { return value_; }
  bool verified() const noexcept { return verified_; }
  Integer as_integer() const;

  friend bool operator==(const Prime& a, const Prime& b) { return a.value_ == b.value_; }
  friend auto operator<=>(const Prime& a, const Prime& b) { return a.value_ <=> b.value_; }

 private:
  Prime(std::uint64_t v, bool verified) : value_(v), verified_(verified) {}
  std::uint64_t value_;
  bool verified_;
};

/// v_p(x); std::nullopt stands for +∞ (x = 0).
std::optional<long> vp(const Integer& x, const Prime& p);
std::optional<long> vp(const Rational& x, const Prime& p);

struct LocalValue {
  Rational coefficient_of_log_p;
  std::uint64_t p = 0;

  double to_double() const;
  friend bool operator==(const LocalValue& a, const LocalValue& b) = default;
};

struct NewtonSegment {
  Rational slope;
  long width = 0;
};

struct NewtonPoint {
  long index = 0;
  long valuation = 0;
};

struct NewtonPolygon {
  std::uint64_t p = 0;
  std::vector<NewtonPoint> points;    // (i, v_p(a_i)) for a_i != 0
  std::vector<NewtonPoint> vertices;  // lower convex hull, increasing abscissa
  std::vector<NewtonSegment> segments;
};

/// Lower convex hull of (i, v_p(a_i)), computed with exact integer cross products.
NewtonPolygon newton_polygon(const RatPoly& p, const Prime& prime);
NewtonPolygon newton_polygon(const IntPoly& p, const Prime& prime);

struct RootValuation {
  Rational valuation;
  long multiplicity = 0;
};

/// Each segment of slope s and width w gives w roots of valuation −s.
std::vector<RootValuation> root_valuations(const NewtonPolygon& np);

/// −min_i v_p(a_i): the Gauss norm of F is p^value.
long gauss_norm_exponent(const IntPoly& f, const Prime& p);
long gauss_norm_exponent(const MultiPoly& f, const Prime& p);

/// Σ_i log max(1, |α_i|_p) over the roots of P, from its Newton polygon.
LocalValue finite_local_mahler(const IntPoly& p, const Prime& prime);

/// (1/d)[Σ log max(1,|α_i|_p) − Σ log|α_i − a|_p] over the roots of P, exact.
/// Throws DomainError when P(a) = 0.
LocalValue empirical_integral_padic(const IntPoly& p, const Rational& a, const Prime& prime);

/// Same integral for the Green function of a primitive linear or constant divisor G = uT − w:
/// (1/d) Σ [deg G · log max(1,|α_i|_p) − log|G(α_i)|_p].
LocalValue empirical_integral_padic(const IntPoly& p, const IntPoly& divisor, const Prime& prime);

/// Integral against the Dirac mass at the Gauss point: 0 for primitive G. Throws DomainError otherwise.
LocalValue equilibrium_integral_gauss(const IntPoly& g, const Prime& prime);

struct PrimeEnumeration {
  std::vector<Prime> primes;  // sorted, unique
  /// Cofactors left after trial division that could not be proven prime.
  std::vector<Integer> unfactored;
  bool possibly_incomplete() const { return !unfactored.empty(); }
};

/// Primes dividing any of `values` (found by trial division up to `bound`, a leftover cofactor below bound²
/// is prime), merged with `extra`.
PrimeEnumeration relevant_primes(std::span<const Integer> values, std::span<const Prime> extra = {},
                                 std::uint64_t bound = kTrialDivisionBound);

}  // namespace heightkit
