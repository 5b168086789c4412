#include "heightkit/heights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "heightkit/errors.hpp"
#include "heightkit/parallel.hpp"

namespace heightkit {
namespace {

constexpr int kTieSteps = 64;

// Valuation recursion for v_p(c) = -e < 0, starting from v_p(z_k) = v at step k.
// Returns λ_p in units of log p, or nullopt on a tie 2v = -e.
std::optional<Rational> bad_reduction_rate(const std::optional<Rational>& v, long e, long k) {
  Rational scale = make_rational(1, Integer(1) << static_cast<unsigned long>(k));
  if (!v || 2 * *v > Rational(-e)) {
    // v_p(f(z)) = -e, after which 2·(-e) < -e and the orbit escapes.
    return scale * Rational(e) / 2;
  }
  if (2 * *v < Rational(-e)) return scale * -*v;
  return std::nullopt;
}

}  // namespace

double HeightBreakdown::finite_sum() const {
  CompensatedSum s;
  for (const auto& f : finite) s.add(f.to_double());
  return s.value();
}

HeightBreakdown weil_height(const IntPoly& input, const RootConfig& config) {
  if (input.is_zero() || input.degree() < 1) throw DomainError("height needs a polynomial of degree >= 1");
  HeightBreakdown out;
  IntPoly p = input;
  if (!is_primitive(p)) {
    out.warnings.push_back("input was not primitive; divided by its content " + to_string(content(p)));
    p = primitive_part(p);
  }
  const RootSet roots = find_roots(p, config);
  out.warnings.insert(out.warnings.end(), roots.warnings.begin(), roots.warnings.end());
  out.degree = p.degree();
  const double d = out.degree;

  CompensatedSum arch;
  double arch_error = 0.0;
  for (const auto& r : roots.roots) {
    const double mag = std::abs(r.value);
    if (mag > 1.0) arch.add(r.multiplicity * std::log(mag));
    if (mag + r.radius > 1.0) arch_error += r.multiplicity * r.radius;
  }

  const Integer lead = abs(p.leading());
  const PrimeEnumeration places = relevant_primes(std::span<const Integer>(&lead, 1));
  for (const auto& prime : places.primes) {
    LocalValue v = finite_local_mahler(p, prime);
    v.coefficient_of_log_p /= out.degree;
    out.finite.push_back(std::move(v));
  }
  if (places.possibly_incomplete()) {
    out.places_possibly_incomplete = true;
    for (const auto& cofactor : places.unfactored) {
      // Unfactored part of the leading coefficient stays archimedean-side so the total is unchanged.
      arch.add(std::log(cofactor.get_d()));
      out.warnings.push_back("possibly incomplete place set: unfactored cofactor " + to_string(cofactor));
    }
  }
  out.arch = arch.value() / d;
  out.arch_error = arch_error / d + 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(out.arch));
  out.total = out.arch + out.finite_sum();
  return out;
}

HeightBreakdown hypersurface_height(const MultiPoly& input, std::size_t grid) {
  if (input.is_zero()) throw DomainError("height of the zero polynomial");
  if (!input.is_homogeneous()) throw DomainError("hypersurface height needs a homogeneous polynomial");
  HeightBreakdown out;
  MultiPoly f = input;
  if (content(f) != 1) {
    out.warnings.push_back("input was not primitive; divided by its content " + to_string(content(f)));
    f = primitive_part(f);
  }
  out.degree = static_cast<int>(f.total_degree());
  const QuadratureResult q = mahler_quadrature(f, grid);
  if (q.nodes_dropped > 0) {
    out.warnings.push_back(std::to_string(q.nodes_dropped) + " quadrature nodes dropped on the zero set");
  }
  out.arch = q.estimate;
  out.arch_error = q.error_estimate;
  // Primitive F has Gauss norm 1 at every prime; record the primes dividing some coefficient.
  std::vector<Integer> coeffs;
  for (const auto& [e, c] : f.terms()) coeffs.push_back(c);
  const PrimeEnumeration places = relevant_primes(coeffs);
  for (const auto& prime : places.primes) {
    out.finite.push_back({Rational(gauss_norm_exponent(f, prime)), prime.value()});
  }
  out.places_possibly_incomplete = places.possibly_incomplete();
  out.total = out.arch + out.finite_sum();
  return out;
}

double QuadraticMap::escape_radius() const {
  const double abs_c = std::abs(c.get_d());
  return (1.0 + std::sqrt(1.0 + 4.0 * abs_c)) / 2.0;
}

ArchEscapeRate local_escape_rate_arch(const QuadraticMap& f, std::complex<double> x, const EscapeConfig& config) {
  const long double abs_c = std::abs(f.c.get_d());
  const long double radius = f.escape_radius();
  const std::complex<long double> c{static_cast<long double>(f.c.get_d()), 0.0L};
  std::complex<long double> z{x.real(), x.imag()};
  long double scale = 1.0L;  // 2^{-k}
  ArchEscapeRate out;
  for (int k = 0; k <= config.max_iterations; ++k) {
    const long double r = std::abs(z);
    if (!std::isfinite(static_cast<double>(r))) break;
    if (r > radius && r > 1.0L) {
      // Remaining correction Σ_{j≥k} 2^{-(j+1)} log|1 + c/z_j²| is at most 2^{-k}·(−log(1 − |c|/r²)).
      const long double tail = abs_c == 0.0L ? 0.0L : -scale * std::log1p(-abs_c / (r * r));
      if (tail <= config.tolerance) {
        out.value = static_cast<double>(scale * std::log(r));
        out.error = static_cast<double>(tail);
        out.iterations = k;
        return out;
      }
    }
    z = z * z + c;
    scale /= 2.0L;
  }
  // Still inside the escape disc after the whole budget: λ ≤ 2^{-K}(log max(R,1) + log 2).
  bool stayed_bounded = true;
  {
    std::complex<long double> w{x.real(), x.imag()};
    for (int k = 0; k <= config.max_iterations; ++k) {
      if (std::abs(w) > radius) {
        stayed_bounded = false;
        break;
      }
      w = w * w + c;
    }
  }
  if (stayed_bounded) {
    const double bound = std::ldexp(std::log(std::max(static_cast<double>(radius), 1.0)) + std::log(2.0),
                                    -config.max_iterations);
    if (bound <= config.tolerance) {
      out.value = 0.0;
      out.error = bound;
      out.iterations = config.max_iterations;
      out.bounded = true;
      return out;
    }
  }
  throw NumericError("escape-rate iteration budget exhausted without escape or boundedness certificate");
}

LocalValue local_escape_rate_padic(const QuadraticMap& f, const Rational& x, const Prime& p, double* error) {
  const auto vc = vp(f.c, p);
  if (!vc || *vc >= 0) {
    // Good reduction: |f(z)|_p = |z|_p² once |z|_p > 1.
    const auto vx = vp(x, p);
    const long v = vx ? *vx : 0;
    return {Rational(std::max(0L, -v)), p.value()};
  }
  const long e = -*vc;
  const auto vx = vp(x, p);
  std::optional<Rational> v0 = vx ? std::optional<Rational>(Rational(*vx)) : std::nullopt;
  if (auto rate = bad_reduction_rate(v0, e, 0)) return {*rate, p.value()};

  // Tie: z_k = p^{-e/2}·u_k with u_k a unit, z_{k+1} = p^{-e}(u_k² + c·p^e). Track u_k modulo p^prec;
  // every further tie consumes e/2 digits of precision.
  const unsigned long half = static_cast<unsigned long>(e / 2);
  unsigned long prec = half * (kTieSteps + 1) + 8;
  Integer pk;
  mpz_ui_pow_ui(pk.get_mpz_t(), p.value(), prec);
  auto reduce = [&](const Rational& r) {
    Integer inv;
    mpz_invert(inv.get_mpz_t(), Integer(r.get_den()).get_mpz_t(), pk.get_mpz_t());
    Integer out = r.get_num() * inv;
    mpz_mod(out.get_mpz_t(), out.get_mpz_t(), pk.get_mpz_t());
    return out;
  };
  Integer shift;
  mpz_ui_pow_ui(shift.get_mpz_t(), p.value(), half);
  Integer u = reduce(x * shift);
  const Integer cu = reduce(f.c * shift * shift);
  long known = 0;  // z_known is on the tie
  for (long k = 0; k < kTieSteps; ++k) {
    Integer s = u * u + cu;
    mpz_mod(s.get_mpz_t(), s.get_mpz_t(), pk.get_mpz_t());
    if (s == 0) break;
    const unsigned long t = mpz_remove(s.get_mpz_t(), s.get_mpz_t(), Integer(p.value()).get_mpz_t());
    if (t >= prec) break;
    if (auto rate = bad_reduction_rate(Rational(static_cast<long>(t) - e), e, k + 1)) return {*rate, p.value()};
    prec -= t;
    mpz_ui_pow_ui(pk.get_mpz_t(), p.value(), prec);
    mpz_mod(u.get_mpz_t(), s.get_mpz_t(), pk.get_mpz_t());
    known = k + 1;
  }
  if (error != nullptr) {
    // λ_p(z_known) <= e/2.
    *error = std::ldexp(0.5 * static_cast<double>(e) * std::log(static_cast<double>(p.value())),
                        -static_cast<int>(known));
    return {Rational(0), p.value()};
  }
  throw NumericError("p-adic orbit stayed on the critical valuation for " + std::to_string(kTieSteps) + " steps");
}

LocalValue local_escape_rate_from_valuation(const QuadraticMap& f, const Rational& valuation, const Prime& p) {
  const auto vc = vp(f.c, p);
  if (!vc || *vc >= 0) {
    return {valuation < 0 ? Rational(-valuation) : Rational(0), p.value()};
  }
  if (auto rate = bad_reduction_rate(valuation, -*vc, 0)) return {*rate, p.value()};
  throw NumericError("valuation " + to_string(valuation) + " is critical for c = " + to_string(f.c) +
                     " at p = " + std::to_string(p.value()) + "; the orbit needs the point itself");
}

bool is_preperiodic(const QuadraticMap& f, const Rational& x, int max_steps) {
  const double radius = f.escape_radius();
  const Integer& den_c = f.c.get_den();
  std::set<Rational> seen;
  Rational z = x;
  for (int k = 0; k <= max_steps; ++k) {
    if (!seen.insert(z).second) return true;
    if (std::abs(z.get_d()) > radius) return false;
    // Some prime escapes once den(z)² does not divide den(c).
    const Integer den_sq = z.get_den() * z.get_den();
    if (mpz_divisible_p(den_c.get_mpz_t(), den_sq.get_mpz_t()) == 0) return false;
    z = z * z + f.c;
  }
  return false;
}

IntPoly minimal_polynomial(const Rational& x) { return IntPoly(std::vector<Integer>{-x.get_num(), x.get_den()}); }

CanonicalHeight canonical_height(const QuadraticMap& f, const IntPoly& input, const EscapeConfig& config,
                                 const RootConfig& root_config) {
  if (input.is_zero() || input.degree() < 1) throw DomainError("canonical height needs a polynomial of degree >= 1");
  CanonicalHeight out;
  IntPoly p = input;
  if (!is_primitive(p)) {
    out.warnings.push_back("input was not primitive; divided by its content " + to_string(content(p)));
    p = primitive_part(p);
  }
  out.degree = p.degree();

  if (out.degree == 1) {
    const Rational x = make_rational(-p.coeffs()[0], p.coeffs()[1]);
    if (is_preperiodic(f, x)) {
      out.preperiodic = true;
      return out;
    }
    const ArchEscapeRate a = local_escape_rate_arch(f, {x.get_d(), 0.0}, config);
    out.arch = a.value;
    out.error = a.error;
    const Integer dens[] = {x.get_den(), f.c.get_den()};
    for (const auto& prime : relevant_primes(dens).primes) {
      double bound = 0.0;
      out.finite.push_back(local_escape_rate_padic(f, x, prime, &bound));
      if (bound > 0.0) {
        out.error += bound;
        out.warnings.push_back("orbit stays on the critical valuation at p = " + std::to_string(prime.value()) +
                               "; local term bounded, not exact");
      }
    }
  } else {
    const RootSet roots = find_roots(p, root_config);
    out.warnings.insert(out.warnings.end(), roots.warnings.begin(), roots.warnings.end());
    std::vector<ArchEscapeRate> rates(roots.roots.size());
    parallel_for(roots.roots.size(), [&](std::size_t i) {
      rates[i] = local_escape_rate_arch(f, roots.roots[i].value, config);
    });
    CompensatedSum arch;
    double error = 0.0;
    for (std::size_t i = 0; i < rates.size(); ++i) {
      arch.add(roots.roots[i].multiplicity * rates[i].value);
      error += roots.roots[i].multiplicity * rates[i].error;
    }
    out.arch = arch.value() / out.degree;
    out.error = error / out.degree;
    const Integer values[] = {abs(p.leading()), f.c.get_den()};
    const PrimeEnumeration places = relevant_primes(values);
    if (places.possibly_incomplete()) out.warnings.push_back("possibly incomplete place set");
    for (const auto& prime : places.primes) {
      Rational sum = 0;
      for (const auto& rv : root_valuations(newton_polygon(p, prime))) {
        sum += local_escape_rate_from_valuation(f, rv.valuation, prime).coefficient_of_log_p * rv.multiplicity;
      }
      out.finite.push_back({sum / out.degree, prime.value()});
    }
  }
  CompensatedSum total;
  total.add(out.arch);
  for (const auto& v : out.finite) total.add(v.to_double());
  out.value = total.value();
  return out;
}

}  // namespace heightkit
