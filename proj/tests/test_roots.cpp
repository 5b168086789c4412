#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "heightkit/errors.hpp"
#include "heightkit/parse.hpp"
#include "heightkit/roots.hpp"
#include "support.hpp"

using namespace heightkit;
using cd = std::complex<double>;

namespace {

bool has_root_near(const RootSet& rs, cd z, double tol) {
  return std::any_of(rs.roots.begin(), rs.roots.end(), [&](const Root& r) { return std::abs(r.value - z) <= tol; });
}

// |P(z)| / Σ|a_i||z|^i in long double, independent of the MPFR evaluator.
long double scaled_residual(const IntPoly& p, cd z) {
  const std::complex<long double> w(z.real(), z.imag());
  std::complex<long double> acc = 0;
  long double scale = 0;
  for (auto it = p.coeffs().rbegin(); it != p.coeffs().rend(); ++it) {
    acc = acc * w + static_cast<long double>(it->get_d());
    scale = scale * std::abs(w) + std::abs(static_cast<long double>(it->get_d()));
  }
  return std::abs(acc) / scale;
}

}  // namespace

TEST_CASE("small examples") {
  const RootSet i2 = find_roots(IntPoly{1, 0, 1});
  CHECK(i2.count() == 2);
  CHECK(has_root_near(i2, {0, 1}, 1e-14));
  CHECK(has_root_near(i2, {0, -1}, 1e-14));
  CHECK(i2.residual_bound < 1e-14);

  const RootSet two = find_roots(IntPoly{-2, 1});
  REQUIRE(two.roots.size() == 1);
  CHECK(two.roots[0].value == cd(2, 0));

  CHECK_THROWS_AS(find_roots(IntPoly{5}), DomainError);
  CHECK_THROWS_AS(find_roots(IntPoly{}), DomainError);
}

TEST_CASE("roots of the degree-six autissier polynomial") {
  const IntPoly p5 = parse_univariate("(T^5-1)*(T-2)+3");
  const RootSet rs = find_roots(p5);
  CHECK(rs.count() == 6);
  // Reference values computed independently to 14 digits.
  const cd expected[] = {{1.45366386091488, 0},
                         {1.85817720174355, 0},
                         {-0.94225326557549, 0.65367273622126},
                         {-0.94225326557549, -0.65367273622126},
                         {0.28633273424627, 1.15131236939171},
                         {0.28633273424627, -1.15131236939171}};
  for (const auto& z : expected) CHECK(has_root_near(rs, z, 1e-12));
  for (const auto& r : rs.roots) CHECK(scaled_residual(p5, r.value) < 1e-14L);
}

TEST_CASE("multiplicities come from the square-free decomposition") {
  // (T - 1)^3 (T^2 + 1)^2 (T + 2)
  const IntPoly p = parse_univariate("(T-1)^3*(T^2+1)^2*(T+2)");
  const RootSet rs = find_roots(p);
  CHECK(rs.count() == 8);
  for (const auto& r : rs.roots) {
    if (std::abs(r.value - cd(1, 0)) < 1e-10) CHECK(r.multiplicity == 3);
    else if (std::abs(std::abs(r.value) - 1.0) < 1e-10) CHECK(r.multiplicity == 2);
    else CHECK(r.multiplicity == 1);
  }
  const auto sf = squarefree_decomposition(p);
  REQUIRE(sf.size() == 3);
  CHECK(sf[0].multiplicity == 1);
  CHECK(sf[0].factor == IntPoly{2, 1});
  CHECK(sf[1].factor == IntPoly{1, 0, 1});
  CHECK(sf[2].factor == IntPoly{-1, 1});
  CHECK_FALSE(is_squarefree(p));
  CHECK(is_squarefree(parse_univariate("T^7-3")));

  const RootSet zero = find_roots(parse_univariate("T^3*(T-5)"));
  CHECK(zero.count() == 4);
  CHECK(has_root_near(zero, {0, 0}, 0.0));
}

TEST_CASE("coprimality") {
  CHECK(are_coprime(parse_univariate("T^2-2"), parse_univariate("T-1")));
  CHECK_FALSE(are_coprime(parse_univariate("T^2-1"), parse_univariate("T-1")));
  CHECK_FALSE(are_coprime(parse_univariate("(T^3+T+1)*(T-7)"), parse_univariate("(T^3+T+1)*(T+7)")));
}

TEST_CASE("Vieta and product identities on random polynomials") {
  testkit::Gen gen(21);
  for (int trial = 0; trial < 40; ++trial) {
    const int d = static_cast<int>(gen.range(1, trial < 30 ? 40 : 256));
    IntPoly p = gen.poly(d, 1'000'000);
    if (p.coeffs()[0] == 0) continue;
    const RootSet rs = find_roots(p);
    REQUIRE(rs.count() == d);
    std::complex<long double> sum = 0;
    long double log_prod = 0;
    double abs_sum = 0;
    for (const auto& r : rs.roots) {
      abs_sum += r.multiplicity * std::abs(r.value);
      sum += static_cast<long double>(r.multiplicity) * std::complex<long double>(r.value.real(), r.value.imag());
      log_prod += r.multiplicity * std::log(static_cast<long double>(std::abs(r.value)));
    }
    const Rational vieta = -Rational(p.coeff(static_cast<std::size_t>(d - 1))) / Rational(p.leading());
    CHECK(std::abs(sum - std::complex<long double>(vieta.get_d(), 0)) <= d * rs.radius_bound + 1e-14 * abs_sum);
    const double expected_log = std::log(std::abs(p.coeffs()[0].get_d())) - std::log(std::abs(p.leading().get_d()));
    CHECK(std::abs(std::exp(static_cast<double>(log_prod) - expected_log) - 1.0) <= 1e-10);
  }
}

TEST_CASE("cyclotomic factors land on the unit circle") {
  const IntPoly p = parse_univariate("(T^12-1)*(T^2-3*T+7)");
  const RootSet rs = find_roots(p);
  int on_circle = 0;
  for (const auto& r : rs.roots) {
    if (std::abs(std::abs(r.value) - 1.0) <= std::max(rs.radius_bound, 1e-15)) on_circle += r.multiplicity;
  }
  CHECK(on_circle == 12);
}

TEST_CASE("Newton refinement") {
  const RefinedRoot r = refine_root(IntPoly{-2, 0, 1}, {1.4, 0}, 20);
  CHECK(r.converged);
  CHECK(std::abs(r.value.real() - std::sqrt(2.0)) < 1e-15);
  CHECK(r.residual < 1e-15);

  // Double root: linear convergence is reported as a multiplicity estimate.
  const RefinedRoot sq = refine_root(IntPoly{0, 0, 1}, {0.1, 0}, 6);
  CHECK(std::abs(sq.value) < 0.01);
  CHECK(sq.multiplicity_estimate == 2);

  const IntPoly p5 = parse_univariate("(T^5-1)*(T-2)+3");
  const RefinedRoot near2 = refine_root(p5, {2.0, 0}, 40);
  CHECK(std::abs(near2.value.real() - 1.85817720174355) < 1e-12);
}

TEST_CASE("root separation from a divisor in extended precision") {
  // P_n has a root at 2 - 3/2^n + O(4^-n); binary64 rounds it to 2 once n > 52.
  const int n = 120;
  const IntPoly p = parse_univariate("(T^" + std::to_string(n) + "-1)*(T-2)+3");
  const LogAbsValue v = log_abs_at_root(p, IntPoly{-2, 1}, {2.0, 0.0});
  CHECK(v.value == doctest::Approx(std::log(3.0) - n * std::log(2.0)).epsilon(1e-13));
  CHECK(v.error < 1e-12);
}

TEST_CASE("determinism") {
  const IntPoly p = parse_univariate("T^40-3*T^17+T^5-11");
  const RootSet a = find_roots(p);
  const RootSet b = find_roots(p);
  REQUIRE(a.roots.size() == b.roots.size());
  for (std::size_t i = 0; i < a.roots.size(); ++i) CHECK(a.roots[i].value == b.roots[i].value);
}
