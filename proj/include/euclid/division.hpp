#pragma once

#include "euclid/algorithm.hpp"
#include "euclid/errors.hpp"
#include "euclid/lft.hpp"
#include "euclid/numeric.hpp"

#include <cstdint>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace euclid {

template <class Int>
struct DivisionStep {
  Digit digit;
  Int remainder;
};

/// Digit sequence of one execution; depth() is the number of divisions P.
struct Trajectory {
  AlgorithmId algo = AlgorithmId::G;
  std::vector<Digit> digits;

  std::size_t depth() const { return digits.size(); }
};

namespace detail {

template <class Int>
std::int64_t narrow_quotient(const Int& m) {
  if constexpr (std::is_integral_v<Int>) {
    return static_cast<std::int64_t>(m);
  } else {
    if (m > std::numeric_limits<std::int64_t>::max()) {
      throw std::overflow_error("division quotient does not fit a 64-bit digit");
    }
    return m.template convert_to<std::int64_t>();
  }
}

template <class Int>
bool in_input_interval(AlgorithmId id, const Int& u, const Int& v) {
  if (u <= 0 || v <= 0) return false;
  switch (id) {
    case AlgorithmId::G: return u < v;
    case AlgorithmId::K: return 2 * u <= v;
    case AlgorithmId::O: return u <= v;
  }
  return false;
}

template <class Int>
std::string pair_text(const Int& u, const Int& v) {
  std::ostringstream os;
  os << '(' << u << ", " << v << ')';
  return os.str();
}

}  // namespace detail

/// True when u/v lies in the half-open interval I' of the algorithm.
template <class Int>
bool in_domain(AlgorithmId id, const Int& u, const Int& v) {
  return detail::in_input_interval(id, u, v);
}

/// One admissible division v = m u + eps r.
///
/// G: 0 <= r < u.  K: s = v - m u in [-u/2, u/2).  O: m odd, s in [-u, u).
/// eps = +1 when s = 0.
template <class Int>
DivisionStep<Int> divide(AlgorithmId id, const Int& u, const Int& v) {
  if (u == 0 || v == 0) throw DomainError("divide: zero operand");
  if (!detail::in_input_interval(id, u, v)) {
    throw DomainError("divide: " + detail::pair_text(u, v) + " is outside the input interval of " +
                      std::string(name(id)));
  }
  Int m;
  switch (id) {
    case AlgorithmId::G: m = v / u; break;
    case AlgorithmId::K: m = (2 * v + u) / (2 * u); break;
    case AlgorithmId::O: m = 2 * (v / (2 * u)) + 1; break;
  }
  Int s = v - m * u;
  DivisionStep<Int> step;
  step.digit.m = detail::narrow_quotient(m);
  step.digit.eps = s < 0 ? -1 : +1;
  step.remainder = s < 0 ? Int(-s) : s;
  return step;
}

/// Runs the algorithm on (u, v) until the remainder vanishes.
template <class Int>
Trajectory decompose(AlgorithmId id, Int u, Int v) {
  Trajectory t;
  t.algo = id;
  while (u != 0) {
    DivisionStep<Int> step = divide(id, u, v);
    t.digits.push_back(step.digit);
    v = std::move(u);
    u = std::move(step.remainder);
  }
  return t;
}

/// Composed branch h_1 o ... o h_P of a trajectory.
template <class Int = BigInt>
Lft<Int> trajectory_lft(const Trajectory& t) {
  const Algorithm algo = Algorithm::of(t.algo);
  Lft<Int> h = Lft<Int>::identity();
  for (const Digit& q : t.digits) h = compose(h, digit_to_lft<Int>(algo, q));
  return h;
}

/// Reduced fraction (u, v) = h(0); the empty trajectory gives (0, 1).
template <class Int = BigInt>
std::pair<Int, Int> reconstruct(const Trajectory& t) {
  const Lft<Int> h = trajectory_lft<Int>(t);
  return {h.b, h.d};
}

/// True when every digit satisfies D1 and the last one D1 and D2.
inline bool well_formed(const Trajectory& t) {
  const Algorithm algo = Algorithm::of(t.algo);
  for (std::size_t i = 0; i < t.digits.size(); ++i) {
    const bool last = i + 1 == t.digits.size();
    if (last ? !algo.admissible_final(t.digits[i]) : !algo.generic(t.digits[i])) return false;
  }
  return true;
}

/// Interval map T(x) = |1/x - A(1/x)| on rationals; T(0) = 0.
inline Rational map_step(AlgorithmId id, const Rational& x) {
  if (x == 0) return Rational(0);
  const BigInt u = numerator_of(x), v = denominator_of(x);
  const DivisionStep<BigInt> step = divide(id, u, v);
  return Rational(step.remainder, u);
}

}  // namespace euclid
