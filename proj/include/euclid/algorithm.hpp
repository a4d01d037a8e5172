#pragma once

#include "euclid/errors.hpp"
#include "euclid/numeric.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <string>
#include <string_view>

namespace euclid {

/// The three fast Euclidean systems: standard (G), centered (K), odd (O).
enum class AlgorithmId { G, K, O };

inline constexpr AlgorithmId kAllAlgorithms[] = {AlgorithmId::G, AlgorithmId::K, AlgorithmId::O};

inline std::string_view name(AlgorithmId id) {
  switch (id) {
    case AlgorithmId::G: return "G";
    case AlgorithmId::K: return "K";
    case AlgorithmId::O: return "O";
  }
  return "?";
}

inline AlgorithmId parse_algorithm(std::string_view s) {
  if (s == "G" || s == "g") return AlgorithmId::G;
  if (s == "K" || s == "k") return AlgorithmId::K;
  if (s == "O" || s == "o") return AlgorithmId::O;
  throw ConfigError("unknown algorithm '" + std::string(s) + "' (expected G, K or O)");
}

inline std::ostream& operator<<(std::ostream& os, AlgorithmId id) { return os << name(id); }

/// A digit (m, eps) of one division v = m*u + eps*r.
struct Digit {
  std::int64_t m = 1;
  int eps = +1;

  friend bool operator==(const Digit&, const Digit&) = default;
  friend auto operator<=>(const Digit&, const Digit&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const Digit& q) {
  return os << '(' << q.m << ',' << (q.eps > 0 ? "+1" : "-1") << ')';
}

/// Parameter table of one Euclidean system.
///
/// Intervals: I = [0, upper], I' = (0, upper) for G and (0, upper] for K, O.
/// The invariant density is returned normalised to unit mass on I.
struct Algorithm {
  AlgorithmId id;

  static Algorithm of(AlgorithmId id) { return Algorithm{id}; }

  /// Right end of I (and of I').
  Rational upper() const { return id == AlgorithmId::K ? Rational(1, 2) : Rational(1); }
  double upper_double() const { return id == AlgorithmId::K ? 0.5 : 1.0; }
  bool upper_in_domain() const { return id != AlgorithmId::G; }

  /// Generic condition D1 on a digit.
  bool generic(const Digit& q) const {
    if (q.eps != 1 && q.eps != -1) return false;
    switch (id) {
      case AlgorithmId::G: return q.m >= 1 && q.eps == 1;
      case AlgorithmId::K: return q.m >= 2 && (q.m != 2 || q.eps == 1);
      case AlgorithmId::O: return q.m >= 1 && (q.m % 2 == 1) && (q.m != 1 || q.eps == 1);
    }
    return false;
  }

  /// Final condition D2 (to be combined with D1).
  bool final_condition(const Digit& q) const {
    return id == AlgorithmId::G ? q.m >= 2 : q.eps == 1;
  }

  bool admissible_final(const Digit& q) const { return generic(q) && final_condition(q); }

  /// Contraction ratio rho.
  double contraction_ratio() const {
    const double phi = std::numbers::phi;
    if (id == AlgorithmId::K) {
      const double r = std::sqrt(2.0) + 1.0;
      return 1.0 / (r * r);
    }
    return 1.0 / (phi * phi);
  }

  /// Kolmogorov entropy of (T, f1 dx); equals |Lambda'(1)|.
  double entropy() const {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const double lphi = std::log(std::numbers::phi);
    switch (id) {
      case AlgorithmId::G: return pi2 / (6.0 * std::numbers::ln2);
      case AlgorithmId::K: return pi2 / (6.0 * lphi);
      case AlgorithmId::O: return pi2 / (9.0 * lphi);
    }
    return 0.0;
  }

  /// Constant K0 of the depth bound P(u,v) <= K0 log v (+1 for v = 1).
  double depth_constant() const {
    return 1.0 / std::log(1.0 / std::sqrt(contraction_ratio())) + 2.0;
  }

  /// Closed-form invariant density, unnormalised, as listed for the system.
  double raw_density(double x) const {
    const double phi = std::numbers::phi;
    switch (id) {
      case AlgorithmId::G: return 1.0 / (std::numbers::ln2 * (1.0 + x));
      case AlgorithmId::K: return (1.0 / (phi + x) + 1.0 / (phi * phi - x)) / std::log(phi);
      case AlgorithmId::O: return 1.0 / (phi - 1.0 + x) + 1.0 / (phi * phi - x);
    }
    return 0.0;
  }

  /// Integral of raw_density over [a, b], evaluated through logarithms.
  double raw_density_integral(double a, double b) const {
    const double phi = std::numbers::phi;
    switch (id) {
      case AlgorithmId::G:
        return std::log1p((b - a) / (1.0 + a)) / std::numbers::ln2;
      case AlgorithmId::K:
        return (std::log1p((b - a) / (phi + a)) - std::log1p(-(b - a) / (phi * phi - a))) /
               std::log(phi);
      case AlgorithmId::O:
        return std::log1p((b - a) / (phi - 1.0 + a)) - std::log1p(-(b - a) / (phi * phi - a));
    }
    return 0.0;
  }

  double density_mass() const { return raw_density_integral(0.0, upper_double()); }

  /// Invariant density normalised to unit mass on I.
  double density(double x) const { return raw_density(x) / density_mass(); }

  /// Mass of the normalised invariant density on [a, b].
  double density_integral(double a, double b) const {
    return raw_density_integral(a, b) / density_mass();
  }
};

}  // namespace euclid
