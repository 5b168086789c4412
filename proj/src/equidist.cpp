#include "heightkit/equidist.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

#include "heightkit/arch.hpp"
#include "heightkit/errors.hpp"
#include "heightkit/parallel.hpp"
#include "heightkit/parse.hpp"

namespace heightkit {
namespace {

bool ident_start(char ch) { return std::isalpha(static_cast<unsigned char>(ch)) != 0 || ch == '_'; }
bool ident_char(char ch) { return std::isalnum(static_cast<unsigned char>(ch)) != 0 || ch == '_'; }

// Replaces every identifier token `n` with the decimal index.
std::string substitute_index(std::string_view text, long n, bool* found = nullptr) {
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (ident_start(text[i])) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      const std::string_view id = text.substr(i, j - i);
      if (id == "n") {
        out += std::to_string(n);
        if (found != nullptr) *found = true;
      } else {
        out += id;
      }
      i = j;
    } else {
      out += text[i++];
    }
  }
  return out;
}

struct RowContext {
  const PointFamily& family;
  const IntPoly& divisor;
  std::span<const Place> places;
  std::optional<double> truncation;
  const ExperimentConfig& config;
  double arch_equilibrium;
};

ExperimentRow compute_row(const RowContext& ctx, long n) {
  ExperimentRow row;
  row.n = n;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  row.height = row.height_error = row.empirical_sum = row.equilibrium_sum = row.gap = nan;
  try {
    IntPoly p = ctx.family.generator(n);
    if (p.is_zero() || p.degree() < 1) throw DomainError("family produced a constant polynomial");
    if (!is_primitive(p)) {
      row.flags.push_back("generated polynomial was not primitive; divided by its content");
      p = primitive_part(p);
    }
    row.degree = p.degree();
    const double d = row.degree;
    const RootSet roots = find_roots(p, ctx.config.roots);
    for (const auto& w : roots.warnings) row.flags.push_back(w);
    const ArchValue mahler = mahler_univariate(roots);
    row.height = mahler.value / d;
    row.height_error = mahler.error / d;

    // Exact collision test when the divisor has a rational root.
    std::optional<Rational> divisor_root;
    std::optional<Rational> p_at_root;
    if (ctx.divisor.degree() == 1) {
      divisor_root = make_rational(-ctx.divisor.coeffs()[0], ctx.divisor.coeffs()[1]);
      p_at_root = p.eval(*divisor_root);
      if (*p_at_root == 0 && (!ctx.truncation || ctx.places.size() > 1 || !ctx.places.front().archimedean())) {
        throw DomainError("orbit meets the divisor at T = " + to_string(*divisor_root));
      }
    }

    CompensatedSum empirical;
    CompensatedSum equilibrium;
    for (const auto& place : ctx.places) {
      PlaceEntry e;
      e.place = place;
      if (place.archimedean()) {
        e.empirical = empirical_integral_arch(p, roots, {ctx.divisor}, ctx.truncation);
        e.equilibrium = ctx.arch_equilibrium;
        if (p_at_root && *p_at_root != 0) {
          // Σ log|G(α_i)| = d·log|u| + log|P(a)/a_d| for G = u·(T − a).
          const double sum_logmax = mahler.value - std::log(std::abs(p.leading().get_d()));
          const Rational ratio = *p_at_root / Rational(p.leading());
          const double log_ratio = std::log(std::abs(ratio.get_d()));
          const double log_u = std::log(std::abs(ctx.divisor.coeffs()[1].get_d()));
          e.empirical_identity = (sum_logmax - d * log_u - log_ratio) / d;
          if (!ctx.truncation && std::abs(*e.empirical_identity - e.empirical) > ctx.config.identity_tolerance) {
            row.flags.push_back("root-based and identity archimedean integrals disagree");
          }
        }
      } else {
        const LocalValue emp = empirical_integral_padic(p, ctx.divisor, *place.prime);
        const LocalValue eq = equilibrium_integral_gauss(ctx.divisor, *place.prime);
        e.empirical_exact = emp.coefficient_of_log_p;
        e.equilibrium_exact = eq.coefficient_of_log_p;
        e.empirical = emp.to_double();
        e.equilibrium = eq.to_double();
      }
      empirical.add(e.empirical);
      equilibrium.add(e.equilibrium);
      row.places.push_back(std::move(e));
    }
    row.empirical_sum = empirical.value();
    row.equilibrium_sum = equilibrium.value();
    row.gap = row.empirical_sum - row.equilibrium_sum;
  } catch (const DomainError& ex) {
    row.ok = false;
    row.flags.emplace_back(ex.what());
  } catch (const NumericError& ex) {
    row.ok = false;
    row.flags.emplace_back(ex.what());
  }
  return row;
}

}  // namespace

PointFamily family_autissier() {
  return {"autissier", [](long n) {
            if (n < 1) throw DomainError("family index must be >= 1");
            return (IntPoly::monomial(1, static_cast<unsigned>(n)) - IntPoly{1}) * IntPoly{-2, 1} + IntPoly{3};
          },
          "(T^n - 1)(T - 2) + 3"};
}

PointFamily family_power_shift(const Integer& a) {
  if (abs(a) < 2) throw DomainError("power-shift family needs |a| >= 2");
  return {"power_shift", [a](long n) {
            if (n < 1) throw DomainError("family index must be >= 1");
            return IntPoly::monomial(1, static_cast<unsigned>(n)) - IntPoly::constant(a);
          },
          "T^n - " + to_string(a)};
}

PointFamily family_from_template(std::string_view text) {
  bool found = false;
  substitute_index(text, 1, &found);
  if (!found) throw DomainError("family template '" + std::string(text) + "' does not use the index n");
  std::string owned(text);
  // Validate once so syntax errors surface before any experiment runs.
  parse_univariate(substitute_index(owned, 1));
  return {owned, [owned](long n) {
            if (n < 1) throw DomainError("family index must be >= 1");
            return parse_univariate(substitute_index(owned, n));
          },
          owned};
}

double predicted_limit(double h_D, double h_X, int d, int degD, int degX, double equilibrium_sum) {
  if (degD < 1 || degX < 1) throw DomainError("predicted limit needs positive degrees");
  const double dd = d;
  return equilibrium_sum + (dd * degD / degX) * (h_D / (dd * degD) - h_X / ((dd + 1.0) * degX));
}

std::string Place::label() const { return prime ? std::to_string(prime->value()) : "inf"; }

std::vector<Place> parse_places(std::string_view text) {
  std::vector<Place> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view item = text.substr(start, end - start);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front())) != 0) item.remove_prefix(1);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back())) != 0) item.remove_suffix(1);
    if (item == "inf" || item == "infinity" || item == "oo") {
      out.push_back(Place::infinity());
    } else {
      std::uint64_t value = 0;
      const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
      if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
        throw DomainError("bad place '" + std::string(item) + "'; expected 'inf' or a prime");
      }
      out.push_back(Place::finite(Prime::checked(value)));
    }
    start = end + 1;
  }
  return out;
}

ExperimentReport run_experiment(const PointFamily& family, const IntPoly& divisor, std::span<const Place> places,
                                std::span<const long> ns, std::optional<double> truncation,
                                const ExperimentConfig& config) {
  if (divisor.is_zero()) throw DomainError("divisor polynomial is zero");
  if (!is_primitive(divisor)) throw DomainError("divisor polynomial " + divisor.to_string() + " is not primitive");
  if (places.empty()) throw DomainError("experiment needs at least one place");
  if (truncation && !(*truncation > 0.0)) throw DomainError("truncation level must be positive");
  for (const auto& pl : places) {
    if (!pl.archimedean() && divisor.degree() > 1) {
      throw DomainError("finite-place integrals need a divisor of degree <= 1");
    }
  }

  ExperimentReport report;
  report.family = family.name;
  report.divisor = divisor;
  report.places.assign(places.begin(), places.end());
  report.truncation = truncation;

  const ArchValue eq_arch = equilibrium_integral_circle({divisor}, config.roots);
  report.divisor_height = -eq_arch.value;
  CompensatedSum eq_sum;
  for (const auto& pl : places) {
    if (pl.archimedean()) eq_sum.add(eq_arch.value);
    else eq_sum.add(equilibrium_integral_gauss(divisor, *pl.prime).to_double());
  }
  report.equilibrium_sum = eq_sum.value();
  report.predicted_limit = divisor.degree() >= 1
                               ? predicted_limit(report.divisor_height, 0.0, 1, divisor.degree(), 1, report.equilibrium_sum)
                               : report.equilibrium_sum;

  const RowContext ctx{family, divisor, places, truncation, config, eq_arch.value};
  report.rows.resize(ns.size());
  parallel_for(ns.size(), [&](std::size_t i) { report.rows[i] = compute_row(ctx, ns[i]); });
  for (const auto& row : report.rows) {
    report.gap_series.push_back(row.gap);
    if (!row.ok) report.warnings.push_back("row n = " + std::to_string(row.n) + " failed");
  }
  return report;
}

}  // namespace heightkit
