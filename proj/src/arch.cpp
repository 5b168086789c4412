#include "heightkit/arch.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include "heightkit/errors.hpp"
#include "heightkit/parallel.hpp"

namespace heightkit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDropThreshold = 1e-300;
constexpr std::size_t kBlockNodes = 4096;
constexpr std::size_t kMaxNodes = std::size_t{1} << 27;

struct GridTerm {
  std::complex<double> coeff;
  std::vector<unsigned> exps;  // exponents of x_1..x_n
};

struct GridSum {
  double value = 0.0;
  std::size_t dropped = 0;
};

// Trapezoid average of log|F(1, ω^{j_1}, ..., ω^{j_n})| over all multi-indices, ω = e^{2πi/N}.
GridSum grid_average(const std::vector<GridTerm>& terms, std::size_t nvars, std::size_t n) {
  std::vector<std::complex<double>> unity(n);
  for (std::size_t k = 0; k < n; ++k) {
    unity[k] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
  }
  std::size_t total = 1;
  for (std::size_t v = 0; v < nvars; ++v) total *= n;
  const std::size_t blocks = (total + kBlockNodes - 1) / kBlockNodes;
  std::vector<CompensatedSum> sums(blocks);
  std::vector<std::size_t> dropped(blocks, 0);
  const std::size_t mask = n - 1;

  parallel_for(blocks, [&](std::size_t b) {
    std::vector<std::size_t> index(nvars);
    const std::size_t begin = b * kBlockNodes;
    const std::size_t end = std::min(total, begin + kBlockNodes);
    for (std::size_t node = begin; node < end; ++node) {
      std::size_t rest = node;
      for (std::size_t v = 0; v < nvars; ++v) {
        index[v] = rest & mask;
        rest >>= std::countr_zero(n);
      }
      std::complex<double> value{0, 0};
      for (const auto& t : terms) {
        std::size_t phase = 0;
        for (std::size_t v = 0; v < nvars; ++v) phase += static_cast<std::size_t>(t.exps[v]) * index[v];
        value += t.coeff * unity[phase & mask];
      }
      const double mag = std::abs(value);
      if (mag < kDropThreshold) {
        ++dropped[b];
        continue;
      }
      sums[b].add(std::log(mag));
    }
  });

  CompensatedSum acc;
  GridSum out;
  for (std::size_t b = 0; b < blocks; ++b) {
    acc.merge(sums[b]);
    out.dropped += dropped[b];
  }
  if (out.dropped == total) throw NumericError("polynomial vanishes at every quadrature node");
  out.value = acc.value() / static_cast<double>(total);
  return out;
}

// log|G(t)| − deg(G)·log max(1,|t|), evaluated on the reversed polynomial outside the unit disc.
double log_norm_of_section(const IntPoly& g, std::complex<double> t) {
  const auto& a = g.coeffs();
  const double r = std::abs(t);
  std::complex<double> acc{0, 0};
  if (r <= 1.0) {
    for (auto it = a.rbegin(); it != a.rend(); ++it) acc = acc * t + it->get_d();
  } else {
    const std::complex<double> w = 1.0 / t;
    for (const auto& c : a) acc = acc * w + c.get_d();
  }
  const double mag = std::abs(acc);
  return mag == 0.0 ? -kInf : std::log(mag);
}

}  // namespace

ArchValue mahler_univariate(const RootSet& roots) {
  CompensatedSum sum;
  sum.add(std::log(std::abs(roots.leading_coeff.get_d())));
  double error = 0.0;
  for (const auto& r : roots.roots) {
    const double mag = std::abs(r.value);
    if (mag > 1.0) sum.add(r.multiplicity * std::log(mag));
    // log max(1,|z|) is 1-Lipschitz in z.
    if (mag + r.radius > 1.0) error += r.multiplicity * r.radius;
  }
  return {sum.value(), error + 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(sum.value()))};
}

ArchValue mahler_univariate(const IntPoly& p, const RootConfig& config) {
  if (p.is_zero()) throw DomainError("Mahler measure of the zero polynomial");
  if (p.degree() == 0) return {std::log(std::abs(p.leading().get_d())), 0.0};
  return mahler_univariate(find_roots(p, config));
}

QuadratureResult mahler_quadrature(const MultiPoly& f, std::size_t grid) {
  if (f.is_zero()) throw DomainError("Mahler measure of the zero polynomial");
  if (!f.is_homogeneous()) throw DomainError("torus quadrature expects a homogeneous polynomial");
  if (grid < 4 || !std::has_single_bit(grid)) throw DomainError("grid size must be a power of two >= 4");
  const std::size_t nvars = f.nvars() == 0 ? 0 : f.nvars() - 1;
  std::vector<GridTerm> terms;
  for (const auto& [e, c] : f.terms()) {
    terms.push_back({{c.get_d(), 0.0}, std::vector<unsigned>(e.begin() + 1, e.end())});
  }
  if (nvars == 0) {
    // F = c·x0^m: log|F(1)| exactly.
    return {std::log(std::abs(terms.front().coeff.real())), 0.0, 0};
  }
  std::size_t fine_total = 1;
  for (std::size_t v = 0; v < nvars; ++v) {
    if (fine_total > kMaxNodes / (2 * grid)) throw DomainError("quadrature grid too large");
    fine_total *= 2 * grid;
  }
  const GridSum coarse = grid_average(terms, nvars, grid);
  const GridSum fine = grid_average(terms, nvars, 2 * grid);
  return {fine.value, std::abs(fine.value - coarse.value), fine.dropped};
}

QuadratureResult mahler_quadrature(const IntPoly& p, std::size_t grid) {
  if (p.is_zero()) throw DomainError("Mahler measure of the zero polynomial");
  return mahler_quadrature(homogenize(MultiPoly::from_univariate(p), static_cast<unsigned>(p.degree())), grid);
}

double green_eval(const GreenSpec& spec, std::complex<double> t) {
  if (spec.divisor.is_zero()) throw DomainError("Green function of the zero section");
  const double sign = spec.sign == GreenSign::Inverse ? 1.0 : -1.0;
  return -sign * log_norm_of_section(spec.divisor, t);
}

double green_eval(const MultiPoly& g, std::span<const std::complex<double>> point, GreenSign sign) {
  if (g.is_zero()) throw DomainError("Green function of the zero section");
  if (!g.is_homogeneous()) throw DomainError("Green function needs a homogeneous polynomial");
  double norm = 0.0;
  for (const auto& x : point) norm = std::max(norm, std::abs(x));
  if (norm == 0.0) throw DomainError("the zero vector is not a projective point");
  // Scale to max|x_i| = 1 so the value does not overflow.
  std::vector<std::complex<double>> scaled(point.begin(), point.end());
  for (auto& x : scaled) x /= norm;
  const double mag = std::abs(g.eval(scaled));
  const double s = sign == GreenSign::Inverse ? 1.0 : -1.0;
  return mag == 0.0 ? s * kInf : -s * std::log(mag);
}

namespace {

IntPoly squarefree_part(const IntPoly& p) {
  if (is_squarefree(p)) return p;
  IntPoly out{1};
  for (const auto& f : squarefree_decomposition(p)) out = out * f.factor;
  return out;
}

double empirical_sum(const RootSet& orbit, const GreenSpec& spec, std::optional<double> truncation,
                     const IntPoly* poly) {
  if (spec.divisor.is_zero()) throw DomainError("Green function of the zero section");
  if (orbit.roots.empty()) throw DomainError("empty orbit");
  std::vector<Root> divisor_roots;
  if (spec.divisor.degree() >= 1) divisor_roots = find_roots(spec.divisor).roots;

  // With the orbit polynomial at hand, near-collisions are resolved in extended precision once
  // coprimality with the divisor is established exactly.
  std::optional<IntPoly> separable;
  if (poly != nullptr && spec.divisor.degree() >= 1) {
    IntPoly sp = squarefree_part(*poly);
    if (are_coprime(sp, spec.divisor)) separable = std::move(sp);
  }
  const double m = spec.divisor.degree();
  const double sign = spec.sign == GreenSign::Inverse ? 1.0 : -1.0;

  CompensatedSum sum;
  int count = 0;
  for (const auto& r : orbit.roots) {
    bool may_meet = false;
    bool near = false;
    for (const auto& q : divisor_roots) {
      const double dist = std::abs(r.value - q.value);
      if (dist <= r.radius + q.radius) may_meet = true;
      if (dist <= 1e-6 * std::max(1.0, std::abs(q.value))) near = true;
    }
    double phi = 0.0;
    if (separable && (may_meet || near)) {
      const LogAbsValue g = log_abs_at_root(*separable, spec.divisor, r.value);
      const double mag = std::abs(r.value);
      phi = sign * (m * (mag > 1.0 ? std::log(mag) : 0.0) - g.value);
      may_meet = false;
    } else {
      phi = green_eval(spec, r.value);
    }
    if (may_meet || std::isinf(phi)) {
      if (!truncation) throw DomainError("orbit meets the divisor; supply a truncation level");
      if (!std::isfinite(phi)) phi = spec.sign == GreenSign::Inverse ? *truncation : -*truncation;
    }
    if (truncation) {
      phi = spec.sign == GreenSign::Inverse ? std::min(*truncation, phi) : std::max(-*truncation, phi);
    }
    sum.add(r.multiplicity * phi);
    count += r.multiplicity;
  }
  return sum.value() / count;
}

}  // namespace

double empirical_integral_arch(const RootSet& orbit, const GreenSpec& spec, std::optional<double> truncation) {
  return empirical_sum(orbit, spec, truncation, nullptr);
}

double empirical_integral_arch(const IntPoly& p, const RootSet& orbit, const GreenSpec& spec,
                               std::optional<double> truncation) {
  return empirical_sum(orbit, spec, truncation, &p);
}

ArchValue equilibrium_integral_circle(const GreenSpec& spec, const RootConfig& config) {
  if (spec.divisor.is_zero()) throw DomainError("Green function of the zero section");
  const ArchValue m = mahler_univariate(spec.divisor, config);
  const double sign = spec.sign == GreenSign::Inverse ? -1.0 : 1.0;
  return {sign * m.value, m.error};
}

}  // namespace heightkit
