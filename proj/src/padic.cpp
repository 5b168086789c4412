#include "heightkit/padic.hpp"

#include <algorithm>
#include <cmath>

#include "heightkit/errors.hpp"

namespace heightkit {
namespace {

Integer to_integer(std::uint64_t v) {
  Integer r;
  mpz_import(r.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
  return r;
}

bool fits_u64(const Integer& x) { return x >= 0 && mpz_sizeinbase(x.get_mpz_t(), 2) <= 64; }

std::uint64_t to_u64(const Integer& x) {
  std::uint64_t v = 0;
  mpz_export(&v, nullptr, 1, sizeof(v), 0, 0, x.get_mpz_t());
  return v;
}

long valuation_or_throw(const std::optional<long>& v) {
  if (!v) throw DomainError("valuation of zero");
  return *v;
}

// Cross product of (a - o) and (b - o).
long cross(const NewtonPoint& o, const NewtonPoint& a, const NewtonPoint& b) {
  return (a.index - o.index) * (b.valuation - o.valuation) - (a.valuation - o.valuation) * (b.index - o.index);
}

NewtonPolygon hull(std::vector<NewtonPoint> points, std::uint64_t p) {
  if (points.empty()) throw DomainError("Newton polygon of the zero polynomial");
  NewtonPolygon np;
  np.p = p;
  np.points = points;
  std::vector<NewtonPoint> h;
  for (const auto& pt : points) {
    while (h.size() >= 2 && cross(h[h.size() - 2], h.back(), pt) <= 0) h.pop_back();
    h.push_back(pt);
  }
  np.vertices = h;
  for (std::size_t i = 1; i < h.size(); ++i) {
    const long width = h[i].index - h[i - 1].index;
    np.segments.push_back({make_rational(h[i].valuation - h[i - 1].valuation, width), width});
  }
  return np;
}

}  // namespace

Prime Prime::checked(std::uint64_t value, std::uint64_t bound) {
  if (value < 2) throw DomainError(std::to_string(value) + " is not prime");
  std::uint64_t d = 2;
  for (; d <= bound && d * d <= value; d += (d == 2 ? 1 : 2)) {
    if (value % d == 0) throw DomainError(std::to_string(value) + " is not prime");
  }
  if (d * d > value) return {value, true};
  const Integer n = to_integer(value);
  if (mpz_probab_prime_p(n.get_mpz_t(), 30) == 0) throw DomainError(std::to_string(value) + " is not prime");
  return {value, false};
}

Integer Prime::as_integer() const { return to_integer(value_); }

std::optional<long> vp(const Integer& x, const Prime& p) {
  if (x == 0) return std::nullopt;
  Integer rest;
  const Integer pp = p.as_integer();
  return static_cast<long>(mpz_remove(rest.get_mpz_t(), x.get_mpz_t(), pp.get_mpz_t()));
}

std::optional<long> vp(const Rational& x, const Prime& p) {
  if (x == 0) return std::nullopt;
  return *vp(x.get_num(), p) - *vp(x.get_den(), p);
}

double LocalValue::to_double() const {
  return coefficient_of_log_p.get_d() * std::log(static_cast<double>(p));
}

NewtonPolygon newton_polygon(const RatPoly& p, const Prime& prime) {
  std::vector<NewtonPoint> pts;
  for (std::size_t i = 0; i < p.coeffs().size(); ++i) {
    if (p.coeffs()[i] != 0) pts.push_back({static_cast<long>(i), *vp(p.coeffs()[i], prime)});
  }
  return hull(std::move(pts), prime.value());
}

NewtonPolygon newton_polygon(const IntPoly& p, const Prime& prime) {
  std::vector<NewtonPoint> pts;
  for (std::size_t i = 0; i < p.coeffs().size(); ++i) {
    if (p.coeffs()[i] != 0) pts.push_back({static_cast<long>(i), *vp(p.coeffs()[i], prime)});
  }
  return hull(std::move(pts), prime.value());
}

std::vector<RootValuation> root_valuations(const NewtonPolygon& np) {
  std::vector<RootValuation> out;
  out.reserve(np.segments.size());
  for (const auto& s : np.segments) out.push_back({-s.slope, s.width});
  return out;
}

long gauss_norm_exponent(const IntPoly& f, const Prime& p) {
  if (f.is_zero()) throw DomainError("Gauss norm of the zero polynomial");
  long best = 0;
  bool first = true;
  for (const auto& c : f.coeffs()) {
    if (c == 0) continue;
    const long v = *vp(c, p);
    best = first ? v : std::min(best, v);
    first = false;
  }
  return -best;
}

long gauss_norm_exponent(const MultiPoly& f, const Prime& p) {
  if (f.is_zero()) throw DomainError("Gauss norm of the zero polynomial");
  long best = 0;
  bool first = true;
  for (const auto& [e, c] : f.terms()) {
    const long v = *vp(c, p);
    best = first ? v : std::min(best, v);
    first = false;
  }
  return -best;
}

LocalValue finite_local_mahler(const IntPoly& p, const Prime& prime) {
  if (p.is_zero()) throw DomainError("local Mahler measure of the zero polynomial");
  Rational total = 0;
  if (p.degree() >= 1) {
    for (const auto& rv : root_valuations(newton_polygon(p, prime))) {
      if (rv.valuation < 0) total -= rv.valuation * rv.multiplicity;
    }
  }
  return {total, prime.value()};
}

LocalValue empirical_integral_padic(const IntPoly& p, const Rational& a, const Prime& prime) {
  if (p.degree() < 1) throw DomainError("orbit polynomial must have degree >= 1");
  const Rational at = p.eval(a);
  if (at == 0) throw DomainError("orbit meets the divisor: P(" + to_string(a) + ") = 0");
  const long v_lead = *vp(p.leading(), prime);
  const long gauss = gauss_norm_exponent(p, prime);  // = -min_j v_p(a_j)
  const long v_at = *vp(at, prime);
  const Rational sum = Rational((v_lead + gauss) + (v_at - v_lead));
  return {make_rational(sum.get_num(), sum.get_den() * p.degree()), prime.value()};
}

LocalValue empirical_integral_padic(const IntPoly& p, const IntPoly& divisor, const Prime& prime) {
  if (p.degree() < 1) throw DomainError("orbit polynomial must have degree >= 1");
  if (divisor.is_zero()) throw DomainError("Green function of the zero section");
  if (divisor.degree() == 0) return {Rational(valuation_or_throw(vp(divisor.leading(), prime))), prime.value()};
  if (divisor.degree() > 1) {
    throw DomainError("finite-place empirical integrals are implemented for linear divisors only");
  }
  // G = u·T + c0, root a = -c0/u; −log|G(α)|_p = v_p(u) + v_p(α − a).
  const Integer& u = divisor.coeffs()[1];
  const Rational a = make_rational(-divisor.coeffs()[0], u);
  LocalValue base = empirical_integral_padic(p, a, prime);
  base.coefficient_of_log_p += Rational(*vp(u, prime));
  return base;
}

LocalValue equilibrium_integral_gauss(const IntPoly& g, const Prime& prime) {
  if (!is_primitive(g)) throw DomainError("divisor polynomial " + g.to_string() + " is not primitive");
  return {Rational(0), prime.value()};
}

PrimeEnumeration relevant_primes(std::span<const Integer> values, std::span<const Prime> extra, std::uint64_t bound) {
  PrimeEnumeration out;
  out.primes.assign(extra.begin(), extra.end());
  for (const auto& raw : values) {
    if (raw == 0) continue;
    Integer n = abs(raw);
    std::uint64_t d = 2;
    for (; d <= bound && Integer(to_integer(d) * d) <= n; d += (d == 2 ? 1 : 2)) {
      if (mpz_divisible_ui_p(n.get_mpz_t(), d) != 0) {
        out.primes.push_back(Prime::checked(d));
        while (mpz_divisible_ui_p(n.get_mpz_t(), d) != 0) mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), d);
      }
    }
    if (n == 1) continue;
    const bool exhausted = Integer(to_integer(d) * d) > n;
    if (exhausted && fits_u64(n)) {
      out.primes.push_back(Prime::checked(to_u64(n)));
    } else if (fits_u64(n) && mpz_probab_prime_p(n.get_mpz_t(), 30) != 0) {
      out.primes.push_back(Prime::checked(to_u64(n), 0));
    } else {
      out.unfactored.push_back(n);
    }
  }
  std::sort(out.primes.begin(), out.primes.end());
  out.primes.erase(std::unique(out.primes.begin(), out.primes.end()), out.primes.end());
  return out;
}

}  // namespace heightkit
