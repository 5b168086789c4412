#pragma once

// Global heights assembled from local contributions: Weil heights of algebraic
// numbers, heights of hypersurfaces of P^n, and canonical heights for the
// quadratic maps z ↦ z² + c with c rational.

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "heightkit/arch.hpp"
#include "heightkit/padic.hpp"
#include "heightkit/poly.hpp"
#include "heightkit/roots.hpp"

namespace heightkit {

struct HeightBreakdown {
  int degree = 0;
  /// Archimedean contribution.
  double arch = 0.0;
  double arch_error = 0.0;
  /// Finite-place contributions, already divided by the degree; one entry per enumerated prime.
  std::vector<LocalValue> finite;
  double total = 0.0;
  /// Set when a leading-coefficient cofactor could not be factored; its log stays in `arch`.
  bool places_possibly_incomplete = false;
  std::vector<std::string> warnings;

  double finite_sum() const;
};

/// h(α) = (1/d) log M(P) for the minimal polynomial P of α, split per place.
/// Non-primitive input is normalized (with a warning).
HeightBreakdown weil_height(const IntPoly& p, const RootConfig& config = {});

/// Height of the hypersurface F = 0 in P^n: the torus Mahler integral of F; every finite place
/// contributes zero for primitive F.
HeightBreakdown hypersurface_height(const MultiPoly& f, std::size_t grid);

/// The quadratic map z ↦ z² + c.
struct QuadraticMap {
  Rational c;
  /// (1 + sqrt(1 + 4|c|)) / 2: beyond this radius the archimedean orbit escapes.
  double escape_radius() const;
};

struct EscapeConfig {
  double tolerance = 1e-12;
  int max_iterations = 100;
};

struct ArchEscapeRate {
  double value = 0.0;
  double error = 0.0;
  int iterations = 0;
  /// The orbit stayed within the escape radius for the whole budget.
  bool bounded = false;
};

/// λ_∞(x) = lim 2^{-k} log max(1, |f^k(x)|). Bounded orbits report 0 with error 2^{-K}(log R + log 2);
/// throws NumericError if that bound exceeds the tolerance.
ArchEscapeRate local_escape_rate_arch(const QuadraticMap& f, std::complex<double> x, const EscapeConfig& config = {});

/// λ_p(x) for rational x, exact in units of log p. When the orbit stays on the critical valuation
/// 2·v = v_p(c) for the whole step budget, λ_p lies in [0, 2^{-K}·(e/2)·log p]: with `error` given, 0 is
/// returned and the bound stored there; otherwise NumericError is thrown.
LocalValue local_escape_rate_padic(const QuadraticMap& f, const Rational& x, const Prime& p,
                                   double* error = nullptr);

/// λ_p for a point known only through its valuation v_p(x). Throws NumericError when
/// 2·v = v_p(c) < 0, where valuations alone do not determine the orbit.
LocalValue local_escape_rate_from_valuation(const QuadraticMap& f, const Rational& valuation, const Prime& p);

struct CanonicalHeight {
  double value = 0.0;
  double error = 0.0;
  int degree = 0;
  double arch = 0.0;
  std::vector<LocalValue> finite;  // divided by the degree
  /// x is rational and its orbit was found to repeat; value is exactly 0.
  bool preperiodic = false;
  std::vector<std::string> warnings;
};

/// ĥ_f(x) for x given by its minimal polynomial P (irreducibility is the caller's responsibility).
CanonicalHeight canonical_height(const QuadraticMap& f, const IntPoly& p, const EscapeConfig& config = {},
                                 const RootConfig& roots = {});

/// For rational x: exact orbit search; true when f^i(x) = f^j(x) for some i < j within the budget.
bool is_preperiodic(const QuadraticMap& f, const Rational& x, int max_steps = 64);

/// Minimal polynomial b·T − a of the rational a/b.
IntPoly minimal_polynomial(const Rational& x);

}  // namespace heightkit
