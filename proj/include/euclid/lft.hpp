#pragma once

#include "euclid/algorithm.hpp"
#include "euclid/errors.hpp"
#include "euclid/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <type_traits>

namespace euclid {

/// Integer Moebius map x -> (a x + b) / (c x + d).
///
/// Stored in coprime form with d > 0 (or c > 0 when d == 0). Composition is
/// the 2x2 matrix product, so every branch built from digit maps keeps
/// |ad - bc| = 1.
template <class Int = BigInt>
struct Lft {
  Int a = 1, b = 0, c = 0, d = 1;

  static Lft identity() { return Lft{1, 0, 0, 1}; }

  Int det() const { return a * d - b * c; }

  friend bool operator==(const Lft&, const Lft&) = default;

  /// Divides out the content and fixes the sign convention.
  Lft& normalize() {
    using std::abs;
    using boost::multiprecision::abs;
    Int g = gcd_(gcd_(abs(a), abs(b)), gcd_(abs(c), abs(d)));
    if (g > 1) {
      a /= g; b /= g; c /= g; d /= g;
    }
    if (d < 0 || (d == 0 && c < 0)) {
      a = -a; b = -b; c = -c; d = -d;
    }
    return *this;
  }

 private:
  static Int gcd_(const Int& x, const Int& y) {
    if constexpr (std::is_integral_v<Int>) {
      return std::gcd(x, y);
    } else {
      return boost::multiprecision::gcd(x, y);
    }
  }
};

template <class Int>
std::ostream& operator<<(std::ostream& os, const Lft<Int>& h) {
  return os << "Lft(" << h.a << ',' << h.b << ',' << h.c << ',' << h.d << ')';
}

/// x -> h(k(x)).
template <class Int>
Lft<Int> compose(const Lft<Int>& h, const Lft<Int>& k) {
  Lft<Int> r{h.a * k.a + h.b * k.c, h.a * k.b + h.b * k.d, h.c * k.a + h.d * k.c,
             h.c * k.b + h.d * k.d};
  r.normalize();
  return r;
}

/// Branch h_[m,eps](x) = 1/(m + eps x) of a digit; throws on a digit outside D1.
template <class Int = BigInt>
Lft<Int> digit_to_lft(const Algorithm& algo, const Digit& q) {
  if (!algo.generic(q)) {
    throw InvalidDigitError("digit (" + std::to_string(q.m) + "," + std::to_string(q.eps) +
                            ") violates the generic condition of algorithm " +
                            std::string(name(algo.id)));
  }
  return Lft<Int>{0, 1, Int(q.eps), Int(q.m)};
}

/// Mirror map: (a x + b)/(c x + d) -> (a x + c)/(b x + d). Reverses the digit
/// order of a composed branch.
template <class Int>
Lft<Int> mirror(const Lft<Int>& h) {
  Lft<Int> r{h.a, h.c, h.b, h.d};
  r.normalize();
  return r;
}

namespace detail {
template <class Int>
Rational linear_at(const Int& p, const Int& q, const Rational& x) {
  return Rational(BigInt(p)) * x + Rational(BigInt(q));
}
}  // namespace detail

/// D[h](x) = |c x + d|.
template <class Int>
Rational lft_denom(const Lft<Int>& h, const Rational& x) {
  Rational den = detail::linear_at(h.c, h.d, x);
  if (den == 0) throw PoleError("LFT evaluated at its pole");
  return den < 0 ? Rational(-den) : den;
}

template <class Int>
Rational lft_eval(const Lft<Int>& h, const Rational& x) {
  const Rational den = detail::linear_at(h.c, h.d, x);
  if (den == 0) throw PoleError("LFT evaluated at its pole");
  return detail::linear_at(h.a, h.b, x) / den;
}

/// |h'(x)| = |ad - bc| / (c x + d)^2.
template <class Int>
Rational lft_deriv_abs(const Lft<Int>& h, const Rational& x) {
  const Rational den = lft_denom(h, x);
  BigInt det = BigInt(h.det());
  if (det < 0) det = -det;
  return Rational(det) / (den * den);
}

template <class Int>
double lft_eval(const Lft<Int>& h, double x) {
  const double den = static_cast<double>(h.c) * x + static_cast<double>(h.d);
  if (den == 0.0) throw PoleError("LFT evaluated at its pole");
  return (static_cast<double>(h.a) * x + static_cast<double>(h.b)) / den;
}

template <class Int>
double lft_deriv_abs(const Lft<Int>& h, double x) {
  const double den = static_cast<double>(h.c) * x + static_cast<double>(h.d);
  if (den == 0.0) throw PoleError("LFT evaluated at its pole");
  return std::abs(static_cast<double>(h.det())) / (den * den);
}

/// |h''(x)| / |h'(x)| = 2|c| / |c x + d|.
template <class Int>
double lft_distortion(const Lft<Int>& h, double x) {
  const double den = static_cast<double>(h.c) * x + static_cast<double>(h.d);
  if (den == 0.0) throw PoleError("LFT evaluated at its pole");
  return 2.0 * std::abs(static_cast<double>(h.c)) / std::abs(den);
}

/// Closed interval [lo, hi] with rational endpoints.
struct RationalInterval {
  Rational lo, hi;
};

/// Separation Delta(h,k) = inf over the interval of
/// |c1 d2 - c2 d1| / |(c1 x + d1)(c2 x + d2)|.
///
/// The product of the denominators is a quadratic in x; its largest modulus on
/// the interval sits at an endpoint or at the vertex, so the infimum is exact.
template <class Int>
Rational lft_delta(const Lft<Int>& h, const Lft<Int>& k, const RationalInterval& iv) {
  const BigInt c1(h.c), d1(h.d), c2(k.c), d2(k.d);
  BigInt num = c1 * d2 - c2 * d1;
  if (num < 0) num = -num;
  if (num == 0) return Rational(0);

  auto quad = [&](const Rational& x) {
    Rational q = (Rational(c1) * x + Rational(d1)) * (Rational(c2) * x + Rational(d2));
    if (q == 0) throw PoleError("lft_delta: denominator vanishes on the interval");
    return q < 0 ? Rational(-q) : q;
  };
  Rational best = std::max(quad(iv.lo), quad(iv.hi));
  const BigInt lead = c1 * c2;
  if (lead != 0) {
    const Rational vertex = Rational(BigInt(-(c1 * d2 + c2 * d1))) / Rational(BigInt(2 * lead));
    if (vertex > iv.lo && vertex < iv.hi) best = std::max(best, quad(vertex));
  }
  return Rational(num) / best;
}

}  // namespace euclid
