#include "heightkit/poly.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "heightkit/errors.hpp"

namespace heightkit {

Rational make_rational(const Integer& num, const Integer& den) {
  if (den == 0) throw DomainError("rational with zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Rational parse_rational(std::string_view text) {
  auto parse_int = [&](std::string_view s) {
    std::string str(s);
    std::size_t start = (!str.empty() && (str[0] == '-' || str[0] == '+')) ? 1 : 0;
    if (start == str.size() ||
        !std::all_of(str.begin() + static_cast<long>(start), str.end(),
                     [](unsigned char ch) { return std::isdigit(ch) != 0; })) {
      throw DomainError("invalid rational number '" + std::string(text) + "'");
    }
    if (str[0] == '+') str.erase(0, 1);
    return Integer(str, 10);
  };
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  return make_rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
}

std::string to_string(const Integer& x) { return x.get_str(10); }

std::string to_string(const Rational& x) { return x.get_str(10); }

// ---------------------------------------------------------------- IntPoly

IntPoly::IntPoly(std::vector<Integer> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

IntPoly::IntPoly(std::initializer_list<long> coeffs) {
  coeffs_.reserve(coeffs.size());
  for (long c : coeffs) coeffs_.emplace_back(c);
  trim();
}

IntPoly IntPoly::constant(const Integer& c) { return IntPoly(std::vector<Integer>{c}); }

IntPoly IntPoly::monomial(const Integer& c, std::size_t degree) {
  std::vector<Integer> v(degree + 1);
  v[degree] = c;
  return IntPoly(std::move(v));
}

void IntPoly::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

const Integer& IntPoly::leading() const {
  if (is_zero()) throw DomainError("leading coefficient of the zero polynomial");
  return coeffs_.back();
}

Integer IntPoly::coeff(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : Integer(0); }

std::size_t IntPoly::low_order() const {
  if (is_zero()) throw DomainError("low order of the zero polynomial");
  std::size_t i = 0;
  while (coeffs_[i] == 0) ++i;
  return i;
}

IntPoly IntPoly::derivative() const {
  if (coeffs_.size() <= 1) return {};
  std::vector<Integer> d(coeffs_.size() - 1);
  for (std::size_t i = 1; i < coeffs_.size(); ++i) d[i - 1] = coeffs_[i] * static_cast<unsigned long>(i);
  return IntPoly(std::move(d));
}

Integer IntPoly::eval(const Integer& x) const {
  Integer acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Rational IntPoly::eval(const Rational& x) const {
  // Horner over the common denominator: P(n/q)·q^d = Σ a_i n^i q^{d-i}.
  if (is_zero()) return 0;
  const Integer& n = x.get_num();
  const Integer& q = x.get_den();
  Integer acc = 0;
  Integer qpow = 1;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc = acc * n + *it * qpow;
    qpow *= q;
  }
  Integer den;
  mpz_pow_ui(den.get_mpz_t(), q.get_mpz_t(), static_cast<unsigned long>(degree()));
  return make_rational(acc, den);
}

namespace {

template <class T>
std::complex<T> horner_complex(const std::vector<Integer>& coeffs, std::complex<T> z) {
  std::complex<T> acc{0, 0};
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    acc = acc * z + static_cast<T>(it->get_d());
  }
  return acc;
}

void append_term(std::ostringstream& out, bool first, const std::string& mag_str, bool negative,
                 const std::string& monomial) {
  if (first) {
    if (negative) out << '-';
  } else {
    out << (negative ? " - " : " + ");
  }
  if (monomial.empty()) {
    out << mag_str;
  } else if (mag_str == "1") {
    out << monomial;
  } else {
    out << mag_str << '*' << monomial;
  }
}

}  // namespace

std::complex<double> IntPoly::eval(std::complex<double> z) const { return horner_complex(coeffs_, z); }

std::complex<long double> IntPoly::eval(std::complex<long double> z) const {
  return horner_complex(coeffs_, z);
}

std::string IntPoly::to_string(std::string_view var) const {
  if (is_zero()) return "0";
  std::ostringstream out;
  bool first = true;
  for (std::size_t k = coeffs_.size(); k-- > 0;) {
    const Integer& c = coeffs_[k];
    if (c == 0) continue;
    std::string mono;
    if (k == 1) mono = std::string(var);
    if (k > 1) mono = std::string(var) + "^" + std::to_string(k);
    Integer mag = abs(c);
    append_term(out, first, mag.get_str(), c < 0, mono);
    first = false;
  }
  return out.str();
}

IntPoly operator+(const IntPoly& a, const IntPoly& b) {
  std::vector<Integer> r(std::max(a.coeffs_.size(), b.coeffs_.size()));
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) r[i] += a.coeffs_[i];
  for (std::size_t i = 0; i < b.coeffs_.size(); ++i) r[i] += b.coeffs_[i];
  return IntPoly(std::move(r));
}

IntPoly operator-(const IntPoly& a) {
  std::vector<Integer> r(a.coeffs_);
  for (auto& c : r) c = -c;
  return IntPoly(std::move(r));
}

IntPoly operator-(const IntPoly& a, const IntPoly& b) { return a + (-b); }

IntPoly operator*(const IntPoly& a, const IntPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Integer> r(a.coeffs_.size() + b.coeffs_.size() - 1);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    if (a.coeffs_[i] == 0) continue;
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) r[i + j] += a.coeffs_[i] * b.coeffs_[j];
  }
  return IntPoly(std::move(r));
}

IntPoly operator*(const Integer& c, const IntPoly& a) {
  std::vector<Integer> r(a.coeffs_);
  for (auto& x : r) x *= c;
  return IntPoly(std::move(r));
}

// ---------------------------------------------------------------- RatPoly

RatPoly::RatPoly(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) {
  for (auto& c : coeffs_) c.canonicalize();
  trim();
}

RatPoly::RatPoly(const IntPoly& p) {
  coeffs_.reserve(p.coeffs().size());
  for (const auto& c : p.coeffs()) coeffs_.emplace_back(c);
}

void RatPoly::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

Rational RatPoly::coeff(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : Rational(0); }

Rational RatPoly::eval(const Rational& x) const {
  Rational acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::string RatPoly::to_string(std::string_view var) const {
  if (is_zero()) return "0";
  std::ostringstream out;
  bool first = true;
  for (std::size_t k = coeffs_.size(); k-- > 0;) {
    const Rational& c = coeffs_[k];
    if (c == 0) continue;
    std::string mono;
    if (k == 1) mono = std::string(var);
    if (k > 1) mono = std::string(var) + "^" + std::to_string(k);
    Rational mag = abs(c);
    std::string mag_str = mag.get_str();
    if (mag.get_den() != 1 && !mono.empty()) mag_str = "(" + mag_str + ")";
    append_term(out, first, mag_str, c < 0, mono);
    first = false;
  }
  return out.str();
}

RatPoly shift(const RatPoly& p, const Rational& a) {
  // Repeated synthetic division by (T - a); O(d^2) exact operations.
  std::vector<Rational> c(p.coeffs());
  const std::size_t n = c.size();
  if (a == 0 || n <= 1) return RatPoly(std::move(c));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = n - 1; j-- > i;) c[j] += a * c[j + 1];
  }
  return RatPoly(std::move(c));
}

RatPoly shift(const IntPoly& p, const Rational& a) { return shift(RatPoly(p), a); }

Integer content(const IntPoly& p) {
  if (p.is_zero()) throw DomainError("content of the zero polynomial");
  Integer g = 0;
  for (const auto& c : p.coeffs()) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    if (g == 1) break;
  }
  return g;
}

IntPoly primitive_part(const IntPoly& p) {
  Integer g = content(p);
  std::vector<Integer> r(p.coeffs());
  for (auto& c : r) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
  return IntPoly(std::move(r));
}

bool is_primitive(const IntPoly& p) { return !p.is_zero() && content(p) == 1; }

// ---------------------------------------------------------------- MultiPoly

MultiPoly MultiPoly::constant(std::size_t nvars, const Integer& c) {
  MultiPoly r(nvars);
  r.add_term(Exponents(nvars, 0), c);
  return r;
}

MultiPoly MultiPoly::variable(std::size_t nvars, std::size_t index) {
  if (index >= nvars) throw DomainError("variable index out of range");
  MultiPoly r(nvars);
  Exponents e(nvars, 0);
  e[index] = 1;
  r.add_term(e, 1);
  return r;
}

MultiPoly MultiPoly::from_univariate(const IntPoly& p) {
  MultiPoly r(1);
  for (std::size_t i = 0; i < p.coeffs().size(); ++i) r.add_term({static_cast<unsigned>(i)}, p.coeffs()[i]);
  return r;
}

void MultiPoly::add_term(const Exponents& e, const Integer& c) {
  if (e.size() != nvars_) throw DomainError("exponent vector length does not match variable count");
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

unsigned MultiPoly::total_degree() const {
  unsigned best = 0;
  for (const auto& [e, c] : terms_) {
    unsigned s = 0;
    for (unsigned k : e) s += k;
    best = std::max(best, s);
  }
  return best;
}

bool MultiPoly::is_homogeneous() const {
  if (terms_.empty()) return true;
  const unsigned m = total_degree();
  return std::all_of(terms_.begin(), terms_.end(), [m](const auto& t) {
    unsigned s = 0;
    for (unsigned k : t.first) s += k;
    return s == m;
  });
}

IntPoly MultiPoly::to_univariate() const {
  if (nvars_ != 1) throw DomainError("polynomial is not univariate");
  std::vector<Integer> c(terms_.empty() ? 0 : terms_.rbegin()->first[0] + 1);
  for (const auto& [e, v] : terms_) c[e[0]] = v;
  return IntPoly(std::move(c));
}

std::complex<double> MultiPoly::eval(std::span<const std::complex<double>> point) const {
  if (point.size() != nvars_) throw DomainError("evaluation point has the wrong dimension");
  std::complex<double> acc{0, 0};
  for (const auto& [e, c] : terms_) {
    std::complex<double> t{c.get_d(), 0};
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (e[i] != 0) t *= std::pow(point[i], static_cast<int>(e[i]));
    }
    acc += t;
  }
  return acc;
}

std::string MultiPoly::to_string(std::span<const std::string> vars) const {
  if (terms_.empty()) return "0";
  std::vector<std::string> names;
  for (std::size_t i = 0; i < nvars_; ++i) {
    names.push_back(i < vars.size() ? vars[i] : "x" + std::to_string(i));
  }
  std::ostringstream out;
  bool first = true;
  // Highest exponent vectors first.
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    std::string mono;
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (e[i] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += names[i];
      if (e[i] > 1) mono += "^" + std::to_string(e[i]);
    }
    Integer mag = abs(c);
    append_term(out, first, mag.get_str(), c < 0, mono);
    first = false;
  }
  return out.str();
}

MultiPoly MultiPoly::pow(unsigned k) const {
  MultiPoly result = constant(nvars_, 1);
  MultiPoly base = *this;
  while (k != 0) {
    if (k & 1U) result = result * base;
    k >>= 1U;
    if (k != 0) base = base * base;
  }
  return result;
}

MultiPoly operator+(const MultiPoly& a, const MultiPoly& b) {
  if (a.nvars_ != b.nvars_) throw DomainError("variable count mismatch");
  MultiPoly r = a;
  for (const auto& [e, c] : b.terms_) r.add_term(e, c);
  return r;
}

MultiPoly operator-(const MultiPoly& a) {
  MultiPoly r(a.nvars_);
  for (const auto& [e, c] : a.terms_) r.terms_.emplace(e, -c);
  return r;
}

MultiPoly operator-(const MultiPoly& a, const MultiPoly& b) { return a + (-b); }

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
  if (a.nvars_ != b.nvars_) throw DomainError("variable count mismatch");
  MultiPoly r(a.nvars_);
  Exponents e(a.nvars_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      r.add_term(e, ca * cb);
    }
  }
  return r;
}

Integer content(const MultiPoly& p) {
  if (p.is_zero()) throw DomainError("content of the zero polynomial");
  Integer g = 0;
  for (const auto& [e, c] : p.terms()) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  return g;
}

MultiPoly primitive_part(const MultiPoly& p) {
  Integer g = content(p);
  MultiPoly r(p.nvars());
  for (const auto& [e, c] : p.terms()) {
    Integer q;
    mpz_divexact(q.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
    r.add_term(e, q);
  }
  return r;
}

MultiPoly homogenize(const MultiPoly& f, unsigned m) {
  MultiPoly r(f.nvars() + 1);
  for (const auto& [e, c] : f.terms()) {
    unsigned s = 0;
    for (unsigned k : e) s += k;
    if (s > m) {
      throw DomainError("homogenization degree " + std::to_string(m) + " is below term degree " +
                        std::to_string(s));
    }
    Exponents h;
    h.reserve(e.size() + 1);
    h.push_back(m - s);
    h.insert(h.end(), e.begin(), e.end());
    r.add_term(h, c);
  }
  return r;
}

MultiPoly dehomogenize(const MultiPoly& f, std::size_t var) {
  if (var >= f.nvars()) throw DomainError("variable index out of range");
  MultiPoly r(f.nvars() - 1);
  for (const auto& [e, c] : f.terms()) {
    Exponents d;
    d.reserve(e.size() - 1);
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (i != var) d.push_back(e[i]);
    }
    r.add_term(d, c);
  }
  return r;
}

}  // namespace heightkit
