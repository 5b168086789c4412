#include <doctest.h>

#include <cmath>

#include "heightkit/errors.hpp"
#include "heightkit/heights.hpp"
#include "heightkit/parse.hpp"
#include "support.hpp"

using namespace heightkit;

namespace {

const double kLog2 = std::log(2.0);

IntPoly P(const std::string& s) { return parse_univariate(s); }

Rational iterate(const QuadraticMap& f, Rational x, int k) {
  for (int i = 0; i < k; ++i) x = x * x + f.c;
  return x;
}

}  // namespace

TEST_CASE("Weil heights") {
  const HeightBreakdown two = weil_height(P("T-2"));
  CHECK(two.total == doctest::Approx(kLog2).epsilon(1e-15));
  CHECK(two.finite.empty());

  CHECK(weil_height(P("T")).total == 0.0);

  const HeightBreakdown half = weil_height(P("2*T-1"));
  CHECK(half.total == doctest::Approx(kLog2).epsilon(1e-15));
  CHECK(half.arch == 0.0);
  REQUIRE(half.finite.size() == 1);
  CHECK(half.finite[0].p == 2);
  CHECK(half.finite[0].coefficient_of_log_p == 1);

  const HeightBreakdown scaled = weil_height(P("6*T-3"));
  CHECK(scaled.total == doctest::Approx(kLog2).epsilon(1e-15));
  CHECK(scaled.warnings.size() == 1);

  CHECK_THROWS_AS(weil_height(P("5")), DomainError);
}

TEST_CASE("Weil height equals the normalized Mahler measure, split over places") {
  testkit::Gen gen(51);
  for (int trial = 0; trial < 100; ++trial) {
    const IntPoly p = gen.primitive_poly(20, 50);
    const HeightBreakdown h = weil_height(p);
    const double mahler = mahler_univariate(p).value / p.degree();
    CHECK(std::abs(h.total - mahler) <= 1e-9);
    CHECK(h.total == doctest::Approx(h.arch + h.finite_sum()));
    CHECK(h.total >= -h.arch_error);
    Rational finite = 0;
    for (const auto& v : h.finite) {
      CHECK(v.coefficient_of_log_p >= 0);
      finite += v.coefficient_of_log_p;
    }
  }
}

TEST_CASE("rational heights match log max(|a|, |b|)") {
  testkit::Gen gen(52);
  for (int trial = 0; trial < 100; ++trial) {
    const Rational x = gen.rational(100000, 100000);
    const double h = weil_height(minimal_polynomial(x)).total;
    CHECK(std::abs(h - testkit::rational_height(x)) <= 1e-12 * (1 + h));
  }
}

TEST_CASE("hypersurface heights") {
  const std::vector<std::string> v1{"x0"};
  const std::vector<std::string> v2{"x0", "x1"};
  const std::vector<std::string> v3{"x0", "x1", "x2"};
  CHECK(std::abs(hypersurface_height(parse_poly("x0", v1), 64).total) < 1e-14);
  const HeightBreakdown lin = hypersurface_height(parse_poly("x1-2*x0", v2), 4096);
  CHECK(std::abs(lin.total - kLog2) < 1e-6);
  REQUIRE(lin.finite.size() == 1);
  CHECK(lin.finite[0].coefficient_of_log_p == 0);
  const HeightBreakdown plane = hypersurface_height(parse_poly("x0+x1+x2", v3), 512);
  CHECK(plane.arch_error < 1e-3);
  CHECK(plane.finite.empty());
  CHECK_THROWS_AS(hypersurface_height(parse_poly("x0+x1^2", v2), 64), DomainError);
}

TEST_CASE("archimedean escape rates") {
  const QuadraticMap z2{Rational(0)};
  CHECK(local_escape_rate_arch(z2, 2.0).value == doctest::Approx(kLog2).epsilon(1e-15));

  const QuadraticMap basilica{Rational(-1)};
  const ArchEscapeRate zero = local_escape_rate_arch(basilica, 0.0);
  CHECK(zero.bounded);
  CHECK(zero.value == 0.0);
  CHECK(zero.error < 1e-12);

  // Oracle: 2^-k log f^k(1) for c = 1 from the exact integer orbit, far past the stopping index.
  const QuadraticMap one{Rational(1)};
  const ArchEscapeRate r = local_escape_rate_arch(one, 1.0);
  CHECK(r.error <= 1e-12);
  const Rational z = iterate(one, Rational(1), 11);
  const double oracle = testkit::rational_height(z) / 2048.0;
  CHECK(std::abs(r.value - oracle) <= 1e-12);
  CHECK(std::abs(r.value - 0.407354522739480002873) <= 1e-12);

  EscapeConfig tight;
  tight.tolerance = 1e-40;
  tight.max_iterations = 20;
  CHECK_THROWS_AS(local_escape_rate_arch(basilica, 0.0, tight), NumericError);
}

TEST_CASE("p-adic escape rates") {
  const Prime p2 = Prime::checked(2), p3 = Prime::checked(3);
  const QuadraticMap good{Rational(1)};
  CHECK(local_escape_rate_padic(good, Rational(5, 8), p2).coefficient_of_log_p == 3);
  CHECK(local_escape_rate_padic(good, Rational(5, 8), p3).coefficient_of_log_p == 0);

  // c = 1/4: e = 2 at p = 2.
  const QuadraticMap bad{Rational(1, 4)};
  CHECK(local_escape_rate_padic(bad, Rational(1, 8), p2).coefficient_of_log_p == 3);
  CHECK(local_escape_rate_padic(bad, Rational(3), p2).coefficient_of_log_p == 1);
  // Tie: v(x) = -1 with e = 2. x = 1/2 gives f(x) = 1/2, a fixed point.
  CHECK_THROWS_AS(local_escape_rate_padic(bad, Rational(1, 2), p2), NumericError);
  // x = 3/2: 5/2, 13/2, 85/2, ... stay on the tie forever without repeating.
  CHECK_THROWS_AS(local_escape_rate_padic(bad, Rational(3, 2), p2), NumericError);
  double bound = 0.0;
  CHECK(local_escape_rate_padic(bad, Rational(3, 2), p2, &bound).coefficient_of_log_p == 0);
  CHECK(bound > 0.0);
  CHECK(bound < 1e-18);
  CHECK_THROWS_AS(local_escape_rate_from_valuation(bad, Rational(-1), p2), NumericError);
  const CanonicalHeight h = canonical_height(bad, P("2*T-3"));
  CHECK_FALSE(h.preperiodic);
  CHECK(h.value > 0.0);
  CHECK(h.error < 1e-12);
  CHECK(local_escape_rate_from_valuation(bad, Rational(-3, 2), p2).coefficient_of_log_p == Rational(3, 2));

  // c = 1/2 at p = 2: integral x escapes after one step with λ = 1/2.
  const QuadraticMap half{Rational(1, 2)};
  CHECK(local_escape_rate_padic(half, Rational(7), p2).coefficient_of_log_p == Rational(1, 2));
}

TEST_CASE("preperiodicity") {
  CHECK(is_preperiodic({Rational(-1)}, Rational(0)));
  CHECK(is_preperiodic({Rational(0)}, Rational(-1)));
  CHECK(is_preperiodic({Rational(-2)}, Rational(2)));
  CHECK(is_preperiodic({Rational(-3, 4)}, Rational(1, 2)));
  CHECK_FALSE(is_preperiodic({Rational(1)}, Rational(0)));
  CHECK_FALSE(is_preperiodic({Rational(-1)}, Rational(1, 3)));
}

TEST_CASE("canonical heights") {
  const CanonicalHeight two = canonical_height({Rational(0)}, P("T-2"));
  CHECK(two.value == doctest::Approx(weil_height(P("T-2")).total).epsilon(1e-15));

  const CanonicalHeight pre = canonical_height({Rational(-1)}, P("T"));
  CHECK(pre.preperiodic);
  CHECK(pre.value == 0.0);

  // Cross-check against h(f^k(1)) / 2^k for k = 10.
  const QuadraticMap one{Rational(1)};
  const CanonicalHeight h1 = canonical_height(one, P("T-1"));
  CHECK(h1.value > 0.0);
  const Rational z10 = iterate(one, Rational(1), 10);
  CHECK(std::abs(h1.value - weil_height(minimal_polynomial(z10)).total / 1024.0) <= 1e-12);

  // For c = 0 the canonical height is the Weil height, also for algebraic points.
  for (const char* s : {"T^2-2", "3*T^3-T+1", "T^4+T^3+T^2+T+1", "5*T^2-7"}) {
    CHECK(std::abs(canonical_height({Rational(0)}, P(s)).value - weil_height(P(s)).total) <= 1e-9);
  }
}

TEST_CASE("functional equation on rational orbits") {
  testkit::Gen gen(53);
  for (const Rational& c : {Rational(1), Rational(-1), Rational(1, 2), Rational(-3, 4)}) {
    const QuadraticMap f{c};
    for (int trial = 0; trial < 15; ++trial) {
      const Rational x = gen.rational(7, 6);
      const Rational fx = x * x + c;
      const CanonicalHeight hx = canonical_height(f, minimal_polynomial(x));
      const CanonicalHeight hfx = canonical_height(f, minimal_polynomial(fx));
      CHECK(std::abs(hfx.value - 2.0 * hx.value) <= 2.0 * 1e-12 + hfx.error + 2.0 * hx.error);
      CHECK(hx.value >= -hx.error);
    }
  }
}

TEST_CASE("functional equation on an algebraic orbit") {
  // x = sqrt(2): f(x) = 2 + c is rational.
  const QuadraticMap f{Rational(1)};
  const double hx = canonical_height(f, P("T^2-2")).value;
  const double hfx = canonical_height(f, minimal_polynomial(Rational(3))).value;
  CHECK(std::abs(hfx - 2.0 * hx) <= 1e-10);
}

TEST_CASE("tie tracking agrees with exact iteration") {
  // Oracle: exact rational orbit, reading λ_p off the first step where 2·v(z_k) != v(c).
  auto exact = [](const Rational& c, Rational z, const Prime& p) -> std::optional<Rational> {
    const long e = -*vp(c, p);
    Rational scale = 1;
    for (int k = 0; k < 10; ++k) {
      const auto v = vp(z, p);
      if (!v || 2 * *v > -e) return scale * e / 2;
      if (2 * *v < -e) return scale * -*v;
      z = z * z + c;
      scale /= 2;
    }
    return std::nullopt;
  };
  testkit::Gen gen(54);
  int resolved = 0;
  for (const Rational& c : {Rational(1, 4), Rational(3, 4), Rational(5, 36), Rational(-7, 16), Rational(2, 9)}) {
    const QuadraticMap f{c};
    for (unsigned long pv : {2UL, 3UL}) {
      const Prime p = Prime::checked(pv);
      const auto vc = vp(c, p);
      if (!vc || *vc >= 0 || *vc % 2 != 0) continue;
      Integer den;
      mpz_ui_pow_ui(den.get_mpz_t(), pv, static_cast<unsigned long>(-*vc / 2));
      for (int trial = 0; trial < 40; ++trial) {
        Integer num = gen.range(-200, 200);
        if (num % static_cast<long>(pv) == 0) num += 1;
        const Rational x = make_rational(num, den);
        const auto oracle = exact(c, x, p);
        if (!oracle) continue;
        ++resolved;
        double bound = 0.0;
        CHECK(local_escape_rate_padic(f, x, p, &bound).coefficient_of_log_p == *oracle);
        CHECK(bound == 0.0);
      }
    }
  }
  CHECK(resolved > 50);
}
