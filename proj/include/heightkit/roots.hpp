#pragma once

// Complex roots of integer polynomials.
//
// Roots are located by Aberth–Ehrlich simultaneous iteration in binary64,
// polished by Newton's method in MPFR, and certified a posteriori: each
// returned value z carries the inclusion radius d·|P(z)|/|P'(z)| (evaluated
// exactly at the binary64 value), and the inclusion discs of a square-free
// factor are checked to be pairwise disjoint, so each disc holds exactly one
// root. Repeated roots are separated exactly beforehand by a square-free
// decomposition.

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "heightkit/poly.hpp"

namespace heightkit {

struct RootConfig {
  /// Required bound on |P(α)| / Σ|a_i||α|^i for every returned root.
  double target_residual = 1e-12;
  /// Aberth sweeps per attempt.
  int max_iterations = 2000;
  /// Extra attempts from a rotated starting circle when certification fails.
  int restarts = 3;
  /// MPFR working precision (bits) of the polishing pass.
  unsigned polish_bits = 128;
  int polish_steps = 6;
};

struct Root {
  std::complex<double> value;
  int multiplicity = 1;
  /// Some root of P lies within this distance of `value`.
  double radius = 0.0;
};

struct RootSet {
  std::vector<Root> roots;
  Integer leading_coeff;
  int degree = 0;
  /// max over roots of |P(α)| / Σ|a_i||α|^i, evaluated on the square-free factor carrying α.
  double residual_bound = 0.0;
  /// max over roots of the inclusion radius.
  double radius_bound = 0.0;
  std::vector<std::string> warnings;

  /// Σ multiplicities; equals degree.
  int count() const;
};

/// All complex roots with multiplicities. Throws DomainError for constant P and
/// NumericError when certification fails after every restart.
RootSet find_roots(const IntPoly& p, const RootConfig& config = {});
RootSet find_roots(const IntPoly& p, double target_residual);

struct RefinedRoot {
  std::complex<double> value;
  double residual = 0.0;  // |P(value)| evaluated in extended precision
  bool converged = false;
  /// Multiplicity guess from the contraction ratio of successive Newton corrections (1 when quadratic).
  int multiplicity_estimate = 1;
};

/// Newton iteration at `bits` of precision starting from `approx`.
/// Throws NumericError when P' vanishes at an iterate that is not a root.
RefinedRoot refine_root(const IntPoly& p, std::complex<double> approx, int steps, unsigned bits = 128);

struct SquareFreeFactor {
  IntPoly factor;  // primitive, positive leading coefficient
  int multiplicity = 1;
};

/// Yun decomposition P = c · Π f_k^k (exact). Factors of degree zero are omitted.
std::vector<SquareFreeFactor> squarefree_decomposition(const IntPoly& p);

/// True when gcd(P, P') is constant; decided modulo a large prime with an exact fallback.
bool is_squarefree(const IntPoly& p);

/// True when P and G share no complex root (same strategy as is_squarefree).
bool are_coprime(const IntPoly& p, const IntPoly& g);

struct LogAbsValue {
  double value = 0.0;
  double error = 0.0;
};

/// log|G(α)| for the root α of the square-free P nearest `approx`. α is re-polished by Newton's method at
/// doubling MPFR precision until log|G(α)| is resolved to about 1e-12; this separates roots of P that lie
/// closer to a root of G than binary64 can represent. Requires are_coprime(P, G); throws NumericError when
/// `max_bits` is not enough.
LogAbsValue log_abs_at_root(const IntPoly& p, const IntPoly& g, std::complex<double> approx,
                            unsigned max_bits = 1U << 14);

}  // namespace heightkit
