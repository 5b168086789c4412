#include "heightkit/roots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include "heightkit/errors.hpp"
#include "mp_float.hpp"

namespace heightkit {

int RootSet::count() const {
  int n = 0;
  for (const auto& r : roots) n += r.multiplicity;
  return n;
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// ------------------------------------------------------------ exact gcd machinery

using QVec = std::vector<Rational>;

void qtrim(QVec& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

QVec to_q(const IntPoly& p) { return QVec(p.coeffs().begin(), p.coeffs().end()); }

QVec qderiv(const QVec& a) {
  QVec d;
  for (std::size_t i = 1; i < a.size(); ++i) d.push_back(a[i] * static_cast<unsigned long>(i));
  qtrim(d);
  return d;
}

QVec qsub(const QVec& a, const QVec& b) {
  QVec r(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
  qtrim(r);
  return r;
}

// Quotient and remainder over Q.
std::pair<QVec, QVec> qdivmod(QVec a, const QVec& b) {
  if (b.empty()) throw DomainError("polynomial division by zero");
  if (a.size() < b.size()) return {QVec{}, a};
  QVec q(a.size() - b.size() + 1);
  const Rational& lead = b.back();
  for (std::size_t k = q.size(); k-- > 0;) {
    Rational c = a[k + b.size() - 1] / lead;
    q[k] = c;
    if (c == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) a[k + j] -= c * b[j];
  }
  a.resize(b.size() - 1);
  qtrim(a);
  qtrim(q);
  return {q, a};
}

QVec qmonic(QVec a) {
  if (a.empty()) return a;
  Rational lead = a.back();
  for (auto& c : a) c /= lead;
  return a;
}

QVec qgcd(QVec a, QVec b) {
  while (!b.empty()) {
    QVec r = qdivmod(a, b).second;
    a = std::move(b);
    b = qmonic(std::move(r));
  }
  return qmonic(std::move(a));
}

IntPoly q_to_primitive(const QVec& a) {
  Integer lcm_den = 1;
  for (const auto& c : a) mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), c.get_den_mpz_t());
  std::vector<Integer> coeffs;
  coeffs.reserve(a.size());
  for (const auto& c : a) coeffs.emplace_back(c.get_num() * (lcm_den / c.get_den()));
  IntPoly p = primitive_part(IntPoly(std::move(coeffs)));
  if (p.leading() < 0) p = -p;
  return p;
}

// ------------------------------------------------------------ modular square-free test

constexpr std::uint64_t kModPrimes[] = {2305843009213693951ULL, 4611686018427387847ULL,
                                        9223372036854775783ULL};

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1;
  while (e != 0) {
    if (e & 1U) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1U;
  }
  return r;
}

using ModVec = std::vector<std::uint64_t>;

void mtrim(ModVec& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

ModVec mod_reduce(const IntPoly& p, std::uint64_t m) {
  ModVec r;
  Integer mm;
  mpz_import(mm.get_mpz_t(), 1, 1, sizeof(m), 0, 0, &m);
  for (const auto& c : p.coeffs()) {
    Integer t;
    mpz_fdiv_r(t.get_mpz_t(), c.get_mpz_t(), mm.get_mpz_t());
    std::uint64_t v = 0;
    mpz_export(&v, nullptr, 1, sizeof(v), 0, 0, t.get_mpz_t());
    r.push_back(v);
  }
  mtrim(r);
  return r;
}

std::size_t mod_gcd_degree(ModVec a, ModVec b, std::uint64_t m) {
  while (!b.empty()) {
    const std::uint64_t inv = powmod(b.back(), m - 2, m);
    while (a.size() >= b.size()) {
      const std::uint64_t c = mulmod(a.back(), inv, m);
      const std::size_t shift = a.size() - b.size();
      for (std::size_t j = 0; j < b.size(); ++j) {
        const std::uint64_t t = mulmod(c, b[j], m);
        a[shift + j] = a[shift + j] >= t ? a[shift + j] - t : a[shift + j] + (m - t);
      }
      mtrim(a);
      if (a.empty()) break;
    }
    std::swap(a, b);
  }
  return a.empty() ? 0 : a.size() - 1;
}

// ------------------------------------------------------------ Aberth–Ehrlich in binary64

struct NewtonRatio {
  std::complex<double> ratio;  // P(z)/P'(z)
  bool at_noise_level = false;  // |P(z)| indistinguishable from rounding error
};

NewtonRatio newton_ratio(const std::vector<double>& a, std::complex<double> z) {
  const std::size_t d = a.size() - 1;
  const double r = std::abs(z);
  std::complex<double> p{0, 0};
  std::complex<double> dp{0, 0};
  double bound = 0.0;
  if (r <= 1.0) {
    for (std::size_t i = d + 1; i-- > 0;) {
      dp = dp * z + p;
      p = p * z + a[i];
      bound = bound * r + std::abs(a[i]);
    }
    NewtonRatio out;
    out.at_noise_level = std::abs(p) <= 4.0 * static_cast<double>(d + 1) * kEps * bound;
    out.ratio = dp == std::complex<double>{0, 0} ? std::complex<double>{0, 0} : p / dp;
    return out;
  }
  // Reversed polynomial in w = 1/z avoids overflow for large |z|.
  const std::complex<double> w = 1.0 / z;
  const double rw = 1.0 / r;
  std::complex<double> q{0, 0};
  std::complex<double> dq{0, 0};
  for (std::size_t i = 0; i <= d; ++i) {
    dq = dq * w + q;
    q = q * w + a[i];
    bound = bound * rw + std::abs(a[i]);
  }
  NewtonRatio out;
  out.at_noise_level = std::abs(q) <= 4.0 * static_cast<double>(d + 1) * kEps * bound;
  const std::complex<double> den = static_cast<double>(d) * q - w * dq;
  out.ratio = den == std::complex<double>{0, 0} ? std::complex<double>{0, 0} : z * q / den;
  return out;
}

double fujiwara_bound(const std::vector<double>& a) {
  const std::size_t d = a.size() - 1;
  const double lead = std::abs(a[d]);
  double best = 0.0;
  for (std::size_t k = 1; k <= d; ++k) {
    double c = std::abs(a[d - k]) / lead;
    if (k == d) c /= 2.0;
    if (c == 0.0) continue;
    best = std::max(best, std::pow(c, 1.0 / static_cast<double>(k)));
  }
  return 2.0 * best;
}

std::vector<std::complex<double>> aberth(const std::vector<double>& a, const RootConfig& config, int attempt) {
  const std::size_t d = a.size() - 1;
  const double radius = std::max(fujiwara_bound(a), 1e-300);
  // Start on a circle shrunk below the bound so the iterates meet roots of both large and small modulus.
  const double start_radius = radius * (attempt == 0 ? 0.5 : 0.5 + 0.15 * attempt);
  const double offset = 0.4 + 0.77 * attempt;
  std::vector<std::complex<double>> z(d);
  for (std::size_t k = 0; k < d; ++k) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(d) + offset;
    z[k] = std::polar(start_radius, theta);
  }
  std::vector<bool> done(d, false);
  std::size_t remaining = d;
  for (int it = 0; it < config.max_iterations && remaining > 0; ++it) {
    for (std::size_t i = 0; i < d; ++i) {
      if (done[i]) continue;
      const NewtonRatio nr = newton_ratio(a, z[i]);
      if (nr.at_noise_level) {
        done[i] = true;
        --remaining;
        continue;
      }
      std::complex<double> s{0, 0};
      for (std::size_t j = 0; j < d; ++j) {
        if (j != i) s += 1.0 / (z[i] - z[j]);
      }
      const std::complex<double> step = nr.ratio / (1.0 - nr.ratio * s);
      z[i] -= step;
      if (std::abs(step) <= 2.0 * kEps * std::abs(z[i])) {
        done[i] = true;
        --remaining;
      }
    }
  }
  return z;
}

struct CertifiedRoot {
  std::complex<double> value;
  double radius;
  double residual;
};

// Polishes binary64 approximations of a square-free factor and certifies them.
// Returns false when certification fails (overlapping discs, residual above target).
bool polish_and_certify(const IntPoly& f, const std::vector<std::complex<double>>& approx,
                        const RootConfig& config, std::vector<CertifiedRoot>& out) {
  const std::size_t d = approx.size();
  std::size_t coeff_bits = 0;
  for (const auto& c : f.coeffs()) coeff_bits = std::max(coeff_bits, mpz_sizeinbase(c.get_mpz_t(), 2));
  const auto prec = static_cast<mpfr_prec_t>(std::max<std::size_t>(config.polish_bits, coeff_bits + 64));
  detail::MpPolyEvaluator eval(f.coeffs(), prec);
  const double unit_roundoff = std::ldexp(1.0, -static_cast<int>(prec) + 1);

  out.clear();
  out.reserve(d);
  for (std::size_t i = 0; i < d; ++i) {
    detail::MpComplex z(prec, approx[i]);
    for (int s = 0; s < config.polish_steps; ++s) {
      eval.evaluate(z);
      if (mpfr_zero_p(eval.value().re.get()) && mpfr_zero_p(eval.value().im.get())) break;
      if (mpfr_zero_p(eval.derivative().re.get()) && mpfr_zero_p(eval.derivative().im.get())) return false;
      const double corr = eval.newton_update(z);
      if (!std::isfinite(corr)) return false;
      if (corr <= unit_roundoff * std::abs(z.to_complex())) break;
    }
    const std::complex<double> value = z.to_complex();
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) return false;
    // Certify at the binary64 value actually returned.
    detail::MpComplex zd(prec, value);
    eval.evaluate(zd);
    const double abs_dp = eval.abs_derivative();
    if (abs_dp == 0.0) return false;
    const double rounding = static_cast<double>(d + 1) * unit_roundoff * eval.scale().to_double() / abs_dp;
    const double radius = static_cast<double>(d) * (eval.newton_ratio() + rounding);
    out.push_back({value, radius, eval.relative_residual()});
  }
  // Disjoint discs each containing a root certify that all d roots are found.
  std::vector<std::size_t> order(d);
  for (std::size_t i = 0; i < d; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return out[x].value.real() < out[y].value.real(); });
  double max_radius = 0.0;
  for (const auto& r : out) max_radius = std::max(max_radius, r.radius);
  for (std::size_t a = 0; a < d; ++a) {
    const auto& ra = out[order[a]];
    for (std::size_t b = a + 1; b < d; ++b) {
      const auto& rb = out[order[b]];
      if (rb.value.real() - ra.value.real() > 2.0 * max_radius) break;
      if (std::abs(ra.value - rb.value) <= ra.radius + rb.radius) return false;
    }
  }
  for (const auto& r : out) {
    if (!(r.residual <= config.target_residual)) return false;
  }
  return true;
}

std::vector<CertifiedRoot> roots_of_squarefree(const IntPoly& f, const RootConfig& config) {
  const int d = f.degree();
  if (d == 1) {
    // Exact linear root, rounded once.
    const Rational r = make_rational(-f.coeffs()[0], f.coeffs()[1]);
    const std::complex<double> value{r.get_d(), 0.0};
    std::vector<CertifiedRoot> out;
    polish_and_certify(f, {value}, config, out);
    return out;
  }
  std::vector<double> a;
  a.reserve(f.coeffs().size());
  for (const auto& c : f.coeffs()) a.push_back(c.get_d());
  if (!std::all_of(a.begin(), a.end(), [](double x) { return std::isfinite(x); })) {
    throw NumericError("coefficients exceed binary64 range");
  }
  std::vector<CertifiedRoot> out;
  for (int attempt = 0; attempt <= config.restarts; ++attempt) {
    const auto approx = aberth(a, config, attempt);
    if (polish_and_certify(f, approx, config, out)) return out;
  }
  throw NumericError("root certification failed for " + f.to_string() + " after " +
                     std::to_string(config.restarts + 1) + " attempts");
}

}  // namespace

bool is_squarefree(const IntPoly& p) {
  if (p.degree() <= 1) return true;
  const IntPoly dp = p.derivative();
  for (std::uint64_t m : kModPrimes) {
    ModVec a = mod_reduce(p, m);
    ModVec b = mod_reduce(dp, m);
    // Degrees must survive reduction for the modular gcd to bound the rational one.
    if (a.size() != p.coeffs().size() || b.size() != dp.coeffs().size()) continue;
    if (mod_gcd_degree(a, b, m) == 0) return true;
    break;
  }
  QVec g = qgcd(to_q(p), to_q(dp));
  return g.size() <= 1;
}

bool are_coprime(const IntPoly& p, const IntPoly& g) {
  if (p.is_zero() || g.is_zero()) return p.degree() == 0 || g.degree() == 0;
  if (p.degree() == 0 || g.degree() == 0) return true;
  for (std::uint64_t m : kModPrimes) {
    ModVec a = mod_reduce(p, m);
    ModVec b = mod_reduce(g, m);
    if (a.size() != p.coeffs().size() || b.size() != g.coeffs().size()) continue;
    if (mod_gcd_degree(a, b, m) == 0) return true;
    break;
  }
  return qgcd(to_q(p), to_q(g)).size() <= 1;
}

std::vector<SquareFreeFactor> squarefree_decomposition(const IntPoly& p) {
  if (p.is_zero()) throw DomainError("square-free decomposition of the zero polynomial");
  std::vector<SquareFreeFactor> out;
  if (p.degree() == 0) return out;
  if (is_squarefree(p)) {
    IntPoly f = primitive_part(p);
    if (f.leading() < 0) f = -f;
    out.push_back({std::move(f), 1});
    return out;
  }
  // Yun's algorithm over Q.
  const QVec a = to_q(p);
  const QVec da = qderiv(a);
  const QVec b = qgcd(a, da);
  QVec c = qdivmod(a, b).first;
  QVec dd = qsub(qdivmod(da, b).first, qderiv(c));
  int k = 1;
  while (c.size() > 1) {
    const QVec g = qgcd(c, dd);
    if (g.size() > 1) out.push_back({q_to_primitive(g), k});
    c = qdivmod(c, g).first;
    dd = qsub(qdivmod(dd, g).first, qderiv(c));
    ++k;
  }
  return out;
}

RootSet find_roots(const IntPoly& p, double target_residual) {
  RootConfig config;
  config.target_residual = target_residual;
  return find_roots(p, config);
}

RootSet find_roots(const IntPoly& p, const RootConfig& config) {
  if (p.is_zero() || p.degree() < 1) throw DomainError("root finding needs a polynomial of degree >= 1");
  RootSet set;
  set.leading_coeff = p.leading();
  set.degree = p.degree();

  const std::size_t zeros = p.low_order();
  if (zeros > 0) set.roots.push_back({{0.0, 0.0}, static_cast<int>(zeros), 0.0});
  const IntPoly rest(std::vector<Integer>(p.coeffs().begin() + static_cast<long>(zeros), p.coeffs().end()));
  if (rest.degree() >= 1) {
    for (const auto& [factor, mult] : squarefree_decomposition(rest)) {
      for (const auto& r : roots_of_squarefree(factor, config)) {
        set.roots.push_back({r.value, mult, r.radius});
        set.residual_bound = std::max(set.residual_bound, r.residual);
        set.radius_bound = std::max(set.radius_bound, r.radius);
      }
    }
  }
  // Roots from distinct square-free factors are distinct; flag numerically indistinguishable pairs.
  for (std::size_t i = 0; i < set.roots.size(); ++i) {
    for (std::size_t j = i + 1; j < set.roots.size(); ++j) {
      if (set.roots[i].multiplicity == set.roots[j].multiplicity) continue;
      if (std::abs(set.roots[i].value - set.roots[j].value) <= 4.0 * set.radius_bound) {
        set.warnings.push_back("roots of different multiplicity are numerically unresolved");
        i = set.roots.size();
        break;
      }
    }
  }
  return set;
}

RefinedRoot refine_root(const IntPoly& p, std::complex<double> approx, int steps, unsigned bits) {
  if (p.degree() < 1) throw DomainError("refine_root needs a polynomial of degree >= 1");
  const auto prec = static_cast<mpfr_prec_t>(std::max(bits, 53U));
  detail::MpPolyEvaluator eval(p.coeffs(), prec);
  detail::MpComplex z(prec, approx);
  const double unit_roundoff = std::ldexp(1.0, -static_cast<int>(prec) + 1);
  RefinedRoot out;
  double prev_corr = 0.0;
  double ratio = 0.0;
  for (int s = 0; s < steps; ++s) {
    eval.evaluate(z);
    if (mpfr_zero_p(eval.value().re.get()) && mpfr_zero_p(eval.value().im.get())) {
      out.converged = true;
      break;
    }
    if (mpfr_zero_p(eval.derivative().re.get()) && mpfr_zero_p(eval.derivative().im.get())) {
      throw NumericError("derivative vanishes at a Newton iterate (clustered roots)");
    }
    const double corr = eval.newton_update(z);
    if (prev_corr > 0.0) ratio = corr / prev_corr;
    prev_corr = corr;
    if (corr <= unit_roundoff * std::max(1.0, std::abs(z.to_complex()))) {
      out.converged = true;
      break;
    }
  }
  out.value = z.to_complex();
  detail::MpComplex zd(prec, out.value);
  eval.evaluate(zd);
  out.residual = eval.abs_value();
  // Newton contracts by (m-1)/m at a root of multiplicity m.
  if (!out.converged && ratio > 0.3 && ratio < 1.0) {
    out.multiplicity_estimate = static_cast<int>(std::lround(1.0 / (1.0 - ratio)));
  }
  return out;
}

LogAbsValue log_abs_at_root(const IntPoly& p, const IntPoly& g, std::complex<double> approx, unsigned max_bits) {
  if (p.degree() < 1) throw DomainError("log_abs_at_root needs a polynomial of degree >= 1");
  if (g.is_zero()) throw DomainError("log of |0|");
  if (g.degree() == 0) return {std::log(std::abs(g.leading().get_d())), 0.0};
  const double d = p.degree();
  // Bound on |G'| near the root: Σ i·|b_i|·(|z| + 1)^{i-1}.
  auto derivative_bound = [&](double radius) {
    double s = 0.0;
    for (std::size_t i = g.coeffs().size(); i-- > 1;) s = s * radius + static_cast<double>(i) * std::abs(g.coeffs()[i].get_d());
    return s;
  };
  for (unsigned bits = 128; bits <= max_bits; bits *= 2) {
    const auto prec = static_cast<mpfr_prec_t>(bits);
    detail::MpPolyEvaluator pe(p.coeffs(), prec);
    detail::MpPolyEvaluator ge(g.coeffs(), prec);
    detail::MpComplex z(prec, approx);
    const double tiny = std::ldexp(1.0, -static_cast<int>(bits) + 4);
    for (int step = 0; step < 16 + static_cast<int>(bits / 64); ++step) {
      pe.evaluate(z);
      if (pe.abs_value() == 0.0) break;
      if (pe.abs_derivative() == 0.0) throw NumericError("derivative vanishes while separating a root");
      if (pe.newton_update(z) <= tiny * std::max(1.0, std::abs(z.to_complex()))) break;
    }
    pe.evaluate(z);
    const double radius = d * pe.newton_ratio();
    ge.evaluate(z);
    detail::MpFloat mag(prec);
    mpfr_hypot(mag.get(), ge.value().re.get(), ge.value().im.get(), MPFR_RNDN);
    if (mpfr_zero_p(mag.get())) continue;
    const double gmag = mag.to_double();
    const double spread = radius * derivative_bound(std::abs(z.to_complex()) + radius + 1.0);
    if (spread <= 1e-13 * gmag) {
      mpfr_log(mag.get(), mag.get(), MPFR_RNDN);
      return {mag.to_double(), 2.0 * spread / gmag + 4.0 * kEps * std::abs(mag.to_double())};
    }
  }
  throw NumericError("could not separate a root from the divisor within " + std::to_string(max_bits) + " bits");
}

}  // namespace heightkit
