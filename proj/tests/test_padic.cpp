#include <doctest.h>

#include <cmath>

#include "heightkit/errors.hpp"
#include "heightkit/padic.hpp"
#include "heightkit/parse.hpp"
#include "support.hpp"

using namespace heightkit;

namespace {

IntPoly P(const std::string& s) { return parse_univariate(s); }

// Valuation by repeated division, independent of mpz_remove.
long naive_vp(Integer x, unsigned long p) {
  long v = 0;
  while (x % p == 0) {
    x /= p;
    ++v;
  }
  return v;
}

}  // namespace

TEST_CASE("primes") {
  CHECK(Prime::checked(2).verified());
  CHECK(Prime::checked(1'000'003).verified());
  CHECK_THROWS_AS(Prime::checked(1), DomainError);
  CHECK_THROWS_AS(Prime::checked(91), DomainError);
  // 2^61 - 1 is prime but beyond trial division: accepted, flagged unverified.
  const Prime big = Prime::checked(2305843009213693951ULL);
  CHECK_FALSE(big.verified());
  CHECK_THROWS_AS(Prime::checked(2305843009213693953ULL), DomainError);
}

TEST_CASE("valuations") {
  const Prime p2 = Prime::checked(2), p3 = Prime::checked(3);
  CHECK(*vp(Integer(3), p3) == 1);
  CHECK(*vp(Integer(6), p2) == 1);
  CHECK(*vp(Integer(31), p3) == 0);
  CHECK_FALSE(vp(Integer(0), p3).has_value());
  CHECK(*vp(Rational(5, 18), p3) == -2);

  testkit::Gen gen(41);
  for (int trial = 0; trial < 300; ++trial) {
    const Integer x = gen.range(1, 100000);
    const Integer y = gen.range(1, 100000);
    for (unsigned long p : {2UL, 3UL, 5UL}) {
      const Prime pr = Prime::checked(p);
      CHECK(*vp(Integer(x * y), pr) == *vp(x, pr) + *vp(y, pr));
      CHECK(*vp(x, pr) == naive_vp(x, p));
    }
  }
}

TEST_CASE("Newton polygon examples") {
  const Prime p3 = Prime::checked(3), p2 = Prime::checked(2);
  const NewtonPolygon sq = newton_polygon(P("T^2-3"), p3);
  REQUIRE(sq.segments.size() == 1);
  CHECK(sq.segments[0].slope == Rational(-1, 2));
  CHECK(sq.segments[0].width == 2);
  const auto rv = root_valuations(sq);
  REQUIRE(rv.size() == 1);
  CHECK(rv[0].valuation == Rational(1, 2));
  CHECK(rv[0].multiplicity == 2);

  const RatPoly shifted = shift(P("(T^5-1)*(T-2)+3"), Rational(2));
  const NewtonPolygon np = newton_polygon(shifted, p3);
  REQUIRE(np.segments.size() == 2);
  CHECK(np.segments[0].slope == -1);
  CHECK(np.segments[0].width == 1);
  CHECK(np.segments[1].slope == 0);
  CHECK(np.segments[1].width == 5);
  const auto sv = root_valuations(np);
  CHECK(sv[0].valuation == 1);
  CHECK(sv[0].multiplicity == 1);
  CHECK(sv[1].valuation == 0);
  CHECK(sv[1].multiplicity == 5);

  const NewtonPolygon lin = newton_polygon(P("T+1"), p2);
  REQUIRE(lin.segments.size() == 1);
  CHECK(lin.segments[0].slope == 0);
  CHECK(lin.segments[0].width == 1);

  CHECK_THROWS_AS(newton_polygon(IntPoly{}, p2), DomainError);
}

TEST_CASE("Newton polygon invariants on random polynomials") {
  testkit::Gen gen(42);
  for (int trial = 0; trial < 300; ++trial) {
    IntPoly p = gen.poly(static_cast<int>(gen.range(1, 15)), 200);
    // Plant powers of p in some coefficients.
    const unsigned long pv = trial % 2 == 0 ? 2 : 3;
    std::vector<Integer> c = p.coeffs();
    for (auto& x : c) {
      if (gen.coin(0.3)) {
        Integer pw;
        mpz_ui_pow_ui(pw.get_mpz_t(), pv, static_cast<unsigned long>(gen.range(1, 6)));
        x *= pw;
      }
    }
    p = IntPoly(c);
    const Prime prime = Prime::checked(pv);
    const NewtonPolygon np = newton_polygon(p, prime);

    long width = 0;
    Rational slope_sum = 0;
    for (std::size_t i = 0; i < np.segments.size(); ++i) {
      width += np.segments[i].width;
      slope_sum += np.segments[i].slope * np.segments[i].width;
      if (i > 0) CHECK(np.segments[i].slope > np.segments[i - 1].slope);
    }
    CHECK(width == p.degree() - static_cast<long>(p.low_order()));
    CHECK(slope_sum == Rational(*vp(p.leading(), prime) - *vp(p.coeffs()[p.low_order()], prime)));
    for (std::size_t i = 1; i < np.vertices.size(); ++i) CHECK(np.vertices[i].index > np.vertices[i - 1].index);
    // No point lies strictly below the hull.
    for (const auto& pt : np.points) {
      for (std::size_t i = 1; i < np.vertices.size(); ++i) {
        const auto& a = np.vertices[i - 1];
        const auto& b = np.vertices[i];
        if (pt.index < a.index || pt.index > b.index) continue;
        const Rational line = Rational(a.valuation) + np.segments[i - 1].slope * (pt.index - a.index);
        CHECK(Rational(pt.valuation) >= line);
      }
    }
  }
}

TEST_CASE("Gauss norms") {
  const Prime p3 = Prime::checked(3);
  CHECK(gauss_norm_exponent(P("(T^5-1)*(T-2)+3"), p3) == 0);
  CHECK(gauss_norm_exponent(P("3*T+6"), p3) == -1);
  const std::vector<std::string> xy{"x", "y"};
  CHECK(gauss_norm_exponent(parse_poly("9*x+27*y", xy), p3) == -2);
}

TEST_CASE("finite local Mahler measure") {
  const Prime p2 = Prime::checked(2);
  CHECK(finite_local_mahler(P("T^3-7*T+1"), p2).coefficient_of_log_p == 0);
  CHECK(finite_local_mahler(P("2*T-1"), p2).coefficient_of_log_p == 1);
  CHECK(finite_local_mahler(P("2*T-1"), p2).to_double() == doctest::Approx(std::log(2.0)));

  testkit::Gen gen(43);
  for (int trial = 0; trial < 200; ++trial) {
    IntPoly p = gen.primitive_poly(12, 60);
    for (unsigned long pv : {2UL, 3UL, 5UL}) {
      const Prime prime = Prime::checked(pv);
      CHECK(finite_local_mahler(p, prime).coefficient_of_log_p == Rational(*vp(p.leading(), prime)));
    }
  }
}

TEST_CASE("p-adic empirical integrals") {
  const Prime p3 = Prime::checked(3), p2 = Prime::checked(2), p5 = Prime::checked(5);
  for (int n = 1; n <= 60; ++n) {
    const IntPoly pn = P("(T^" + std::to_string(n) + "-1)*(T-2)+3");
    CHECK(empirical_integral_padic(pn, Rational(2), p3).coefficient_of_log_p == Rational(1, n + 1));
  }
  CHECK(empirical_integral_padic(P("T-6"), Rational(0), p2).coefficient_of_log_p == 1);
  CHECK(empirical_integral_padic(P("T^7-2"), Rational(1), p5).coefficient_of_log_p == 0);
  CHECK_THROWS_AS(empirical_integral_padic(P("T^2-4"), Rational(2), p3), DomainError);

  // Linear divisors: G = u·T + c0 adds v_p(u).
  CHECK(empirical_integral_padic(P("T^3-5"), P("3*T-1"), p3).coefficient_of_log_p ==
        empirical_integral_padic(P("T^3-5"), Rational(1, 3), p3).coefficient_of_log_p + 1);
  CHECK_THROWS_AS(empirical_integral_padic(P("T^3-5"), P("T^2+1"), p3), DomainError);

  testkit::Gen gen(44);
  for (int trial = 0; trial < 200; ++trial) {
    const IntPoly p = gen.poly(static_cast<int>(gen.range(1, 10)), 40);
    const Rational a = gen.rational(30, 12);
    if (p.eval(a) == 0) continue;
    const Integer c = gen.range(1, 50) * (gen.coin() ? 1 : -1);
    for (unsigned long pv : {2UL, 3UL, 7UL}) {
      const Prime prime = Prime::checked(pv);
      CHECK(empirical_integral_padic(c * p, a, prime) == empirical_integral_padic(p, a, prime));
    }
  }
}

TEST_CASE("shifted polygons see v_p(P(a))") {
  testkit::Gen gen(45);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Integer> c = gen.poly(static_cast<int>(gen.range(1, 10)), 60).coeffs();
    c.back() = 1;  // monic
    const IntPoly p(c);
    const Prime prime = Prime::checked(trial % 3 == 0 ? 2 : (trial % 3 == 1 ? 3 : 5));
    const bool integral = trial % 2 == 0;
    const Rational a = integral ? Rational(gen.range(-30, 30)) : gen.rational(30, 20);
    const Rational pa = p.eval(a);
    if (pa == 0) continue;
    Rational total = 0;
    Rational positive = 0;
    for (const auto& rv : root_valuations(newton_polygon(shift(p, a), prime))) {
      total += rv.valuation * rv.multiplicity;
      if (rv.valuation > 0) positive += rv.valuation * rv.multiplicity;
    }
    CHECK(total == Rational(*vp(pa, prime)));
    if (integral) CHECK(positive == Rational(*vp(pa, prime)));
  }
}

TEST_CASE("equilibrium at the Gauss point") {
  const Prime p3 = Prime::checked(3);
  CHECK(equilibrium_integral_gauss(P("T-2"), Prime::checked(7)).coefficient_of_log_p == 0);
  CHECK(equilibrium_integral_gauss(P("(T^5-1)*(T-2)+3"), p3).coefficient_of_log_p == 0);
  CHECK_THROWS_AS(equilibrium_integral_gauss(P("3*T-3"), p3), DomainError);
}

TEST_CASE("relevant prime enumeration") {
  const Integer vals[] = {Integer(360), Integer(-49)};
  const PrimeEnumeration e = relevant_primes(vals);
  REQUIRE(e.primes.size() == 4);
  CHECK(e.primes[0].value() == 2);
  CHECK(e.primes[3].value() == 7);
  CHECK_FALSE(e.possibly_incomplete());

  // Product of two primes above a small trial bound.
  const Integer semi[] = {Integer(1009) * Integer(1013)};
  const PrimeEnumeration f = relevant_primes(semi, {}, 1000);
  CHECK(f.possibly_incomplete());
  CHECK(f.primes.empty());
  const PrimeEnumeration g = relevant_primes(semi);
  CHECK_FALSE(g.possibly_incomplete());
  CHECK(g.primes.size() == 2);

  const Prime extra[] = {Prime::checked(13)};
  const Integer one[] = {Integer(1)};
  CHECK(relevant_primes(one, extra).primes.size() == 1);
}
