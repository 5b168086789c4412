#pragma once

// Sequences of algebraic points given by polynomial families, and the runner
// that tabulates, per place, the integrals of a divisor's Green function
// against the empirical measures of each orbit and against the equilibrium
// measure of the Weil metric.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "heightkit/padic.hpp"
#include "heightkit/poly.hpp"
#include "heightkit/roots.hpp"

namespace heightkit {

struct PointFamily {
  std::string name;
  /// n ↦ minimal polynomial of x_n; deterministic, degree >= 1 for n >= 1.
  std::function<IntPoly(long)> generator;
  std::string description;
};

/// n ↦ (T^n − 1)(T − 2) + 3.
PointFamily family_autissier();

/// n ↦ T^n − a, with |a| >= 2.
PointFamily family_power_shift(const Integer& a);

/// Polynomial text in T where the identifier `n` stands for the index, e.g. "T^n-2" or "(T^n-1)*(T-2)+3".
PointFamily family_from_template(std::string_view text);

/// equilibrium_sum + (d·degD/degX)·(h_D/(d·degD) − h_X/((d+1)·degX)).
double predicted_limit(double h_D, double h_X, int d, int degD, int degX, double equilibrium_sum);

/// The archimedean place, or the p-adic place of a prime.
struct Place {
  std::optional<Prime> prime;

  static Place infinity() { return {}; }
  static Place finite(const Prime& p) { return {p}; }
  bool archimedean() const { return !prime.has_value(); }
  /// "inf" or the decimal prime.
  std::string label() const;
};

/// Parses a comma-separated list such as "inf,3,5". Throws DomainError on bad entries or non-primes.
std::vector<Place> parse_places(std::string_view text);

struct PlaceEntry {
  Place place;
  double empirical = 0.0;
  double equilibrium = 0.0;
  /// Finite places: exact values in units of log p.
  std::optional<Rational> empirical_exact;
  std::optional<Rational> equilibrium_exact;
  /// Archimedean place with a rational divisor root a: the same integral with Σ log|α_i − a|
  /// replaced by log|P(a)/a_d|.
  std::optional<double> empirical_identity;
};

struct ExperimentRow {
  long n = 0;
  int degree = 0;
  double height = 0.0;
  double height_error = 0.0;
  std::vector<PlaceEntry> places;
  double empirical_sum = 0.0;
  double equilibrium_sum = 0.0;
  /// empirical_sum − equilibrium_sum.
  double gap = 0.0;
  /// False when the row could not be computed; `flags` says why.
  bool ok = true;
  std::vector<std::string> flags;
};

struct ExperimentReport {
  std::string family;
  IntPoly divisor;
  std::vector<Place> places;
  std::optional<double> truncation;
  /// log M(G), the height of the divisor.
  double divisor_height = 0.0;
  double equilibrium_sum = 0.0;
  double predicted_limit = 0.0;
  std::vector<ExperimentRow> rows;
  std::vector<double> gap_series;
  std::vector<std::string> warnings;
};

struct ExperimentConfig {
  RootConfig roots;
  /// Allowed disagreement between the root-based and identity routes before a row is flagged.
  double identity_tolerance = 1e-9;
};

/// Runs the family over `ns` for the Green function of the primitive divisor G. Finite places need G of
/// degree <= 1. Rows are computed concurrently and reported in the order of `ns`.
ExperimentReport run_experiment(const PointFamily& family, const IntPoly& divisor, std::span<const Place> places,
                                std::span<const long> ns, std::optional<double> truncation = std::nullopt,
                                const ExperimentConfig& config = {});

}  // namespace heightkit
