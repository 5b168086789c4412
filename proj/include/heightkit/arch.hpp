#pragma once

// Archimedean local quantities for the standard Weil metric on O(1):
// Mahler measures (root-based and by torus quadrature), the Green function
// log‖s‖⁻¹ of a divisor, and its integrals against empirical (Galois orbit)
// and equilibrium (Haar measure on |t| = 1) measures.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>

#include "heightkit/poly.hpp"
#include "heightkit/roots.hpp"

namespace heightkit {

/// A real value with an a posteriori error bound.
struct ArchValue {
  double value = 0.0;
  double error = 0.0;
};

/// log M(P) = log|a_d| + Σ log max(1, |α_i|) from certified roots.
ArchValue mahler_univariate(const IntPoly& p, const RootConfig& config = {});
ArchValue mahler_univariate(const RootSet& roots);

struct QuadratureResult {
  /// Value on the refined (2N per axis) grid.
  double estimate = 0.0;
  /// |estimate(N) - estimate(2N)|; not a rigorous bound.
  double error_estimate = 0.0;
  /// Nodes of the refined grid where |F| < 1e-300; they contribute zero to the average.
  std::size_t nodes_dropped = 0;
};

/// Tensor trapezoid rule for (2π)^{-n} ∫ log|F(1, e^{iθ_1}, ..., e^{iθ_n})| dθ with F homogeneous in n+1 variables.
/// `grid` is the node count per axis (a power of two, at least 4).
QuadratureResult mahler_quadrature(const MultiPoly& f, std::size_t grid);
/// Univariate form: (2π)^{-1} ∫ log|P(e^{iθ})| dθ.
QuadratureResult mahler_quadrature(const IntPoly& p, std::size_t grid);

enum class Metric { WeilStandard };

/// Selects log‖s‖⁻¹ (Inverse) or log‖s‖ (Direct).
enum class GreenSign { Inverse = 1, Direct = -1 };

struct GreenSpec {
  IntPoly divisor;
  Metric metric = Metric::WeilStandard;
  GreenSign sign = GreenSign::Inverse;
};

/// m·log max(1,|t|) − log|G(t)| (negated for GreenSign::Direct). Returns ±infinity on the divisor.
double green_eval(const GreenSpec& spec, std::complex<double> t);

/// Projective form for homogeneous G of degree m: m·log max|x_i| − log|G(x)|.
double green_eval(const MultiPoly& g, std::span<const std::complex<double>> point, GreenSign sign = GreenSign::Inverse);

/// (1/d) Σ mult·φ(α) over the orbit, with φ = green_eval clamped to at most `truncation`
/// (at least −truncation for GreenSign::Direct) when given.
/// Throws DomainError if an orbit root may lie on the divisor and no truncation is supplied.
double empirical_integral_arch(const RootSet& orbit, const GreenSpec& spec,
                               std::optional<double> truncation = std::nullopt);

/// Same integral for the orbit of P (with `orbit` = find_roots(P)). Roots lying too close to the divisor for
/// binary64 are re-polished in extended precision when P and G are coprime, so only genuine shared roots
/// need a truncation.
double empirical_integral_arch(const IntPoly& p, const RootSet& orbit, const GreenSpec& spec,
                               std::optional<double> truncation = std::nullopt);

/// ∫ φ d(Haar on |t| = 1) = −log M(G) for the inverse sign.
ArchValue equilibrium_integral_circle(const GreenSpec& spec, const RootConfig& config = {});

}  // namespace heightkit
