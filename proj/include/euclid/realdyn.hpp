#pragma once

#include "euclid/algorithm.hpp"
#include "euclid/cost.hpp"
#include "euclid/division.hpp"
#include "euclid/ensemble.hpp"
#include "euclid/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace euclid {

struct BirkhoffResult {
  Rational sum = 0;
  int steps = 0;  // min(n, P(x0))
};

/// C_n(x0): cost of the first n digits of x0 (fewer if the trajectory ends).
inline BirkhoffResult birkhoff_sum(AlgorithmId id, const DigitCost& cost, const Rational& x0, int n) {
  if (n < 0) throw ConfigError("birkhoff_sum needs n >= 0");
  BigInt u = numerator_of(x0), v = denominator_of(x0);
  if (!in_domain(id, u, v)) throw DomainError("birkhoff_sum: x0 outside the input interval");
  BirkhoffResult r;
  while (r.steps < n && u != 0) {
    DivisionStep<BigInt> s = divide(id, u, v);
    r.sum += cost(s.digit);
    ++r.steps;
    v = std::move(u);
    u = std::move(s.remainder);
  }
  return r;
}

/// Union over the signs of the cylinders h_(m,eps)(I) of digit m, or an empty
/// interval (lo > hi) when m is not a digit of the algorithm.
struct DigitInterval {
  double lo = 1, hi = 0;
};

inline DigitInterval digit_interval(const Algorithm& algo, std::int64_t m) {
  const double xm = algo.upper_double();
  DigitInterval out;
  for (int eps : {+1, -1}) {
    if (!algo.generic({m, eps})) continue;
    const double a = 1.0 / static_cast<double>(m), b = 1.0 / (static_cast<double>(m) + eps * xm);
    out.lo = std::min({out.lo, a, b});
    out.hi = std::max({out.hi, a, b});
  }
  out.hi = std::min(out.hi, xm);
  return out;
}

/// Mass of the cylinder of one digit under the normalised invariant density.
inline double cylinder_mass(const Algorithm& algo, const Digit& q) {
  if (!algo.generic(q)) return 0.0;
  const double xm = algo.upper_double();
  const double a = 1.0 / static_cast<double>(q.m), b = 1.0 / (static_cast<double>(q.m) + q.eps * xm);
  return algo.density_integral(std::min(a, b), std::max(a, b));
}

struct MuHat {
  double value = 0;
  /// Bound on the contribution of digits m > m_cap (zero when summed exactly).
  double tail_bound = 0;
};

/// mu^(c) = sum over digits q of c(q) times the f1-mass of the cylinder of q,
/// with f1 normalised to unit mass.
inline MuHat mu_hat_closed_form(AlgorithmId id, const DigitCost& cost, std::int64_t m_cap = 64) {
  if (m_cap < 2) throw ConfigError("mu_hat_closed_form needs m_cap >= 2");
  const Algorithm algo = Algorithm::of(id);
  const double scale = to_double(cost.scale());
  MuHat out;
  switch (cost.kind()) {
    case DigitCost::Kind::Unit: {
      // Digits up to m_cap one by one, then the union of all later cylinders.
      double sum = 0;
      double last_lo = algo.upper_double();
      for (std::int64_t m = 1; m <= m_cap; ++m) {
        const DigitInterval iv = digit_interval(algo, m);
        if (iv.lo > iv.hi) continue;
        sum += algo.density_integral(iv.lo, iv.hi);
        last_lo = iv.lo;
      }
      sum += algo.density_integral(0.0, last_lo);
      out.value = scale * sum;
      return out;
    }
    case DigitCost::Kind::Indicator: {
      const DigitInterval iv = digit_interval(algo, cost.indicator_digit());
      out.value = iv.lo > iv.hi ? 0.0 : scale * algo.density_integral(iv.lo, iv.hi);
      return out;
    }
    case DigitCost::Kind::BinaryLength: {
      // Cost k+1 is constant on m in [2^k, 2^{k+1}); the union of those cylinders is an interval.
      double sum = 0;
      for (int k = 0; k < 62; ++k) {
        std::int64_t first = std::int64_t{1} << k, last = (std::int64_t{1} << (k + 1)) - 1;
        while (first <= last && digit_interval(algo, first).lo > digit_interval(algo, first).hi) ++first;
        while (last >= first && digit_interval(algo, last).lo > digit_interval(algo, last).hi) --last;
        if (first > last) continue;
        const double lo = digit_interval(algo, last).lo, hi = digit_interval(algo, first).hi;
        sum += static_cast<double>(k + 1) * algo.density_integral(lo, hi);
      }
      out.value = scale * sum;
      return out;
    }
    case DigitCost::Kind::Table: {
      double sum = 0;
      const std::int64_t top = std::min(m_cap, cost.table_max_m());
      for (const Digit& q : detail::digits_up_to(id, top)) {
        double c = 0;
        try {
          c = cost.value(q);
        } catch (const MissingTableEntryError&) {
          continue;
        }
        sum += c * cylinder_mass(algo, q);
      }
      out.value = sum;
      // Cylinders of digit m have length <= 2/(m^2 - 1) and density <= max f1.
      const GrowthEnvelope env = growth_envelope(cost, id, std::max<std::int64_t>(top, 2));
      const double fmax = std::max(algo.density(0.0), algo.density(algo.upper_double()));
      const double M = static_cast<double>(top);
      out.tail_bound = M < 2 ? 0.0 : 4.0 * fmax * (env.A + env.B * (std::log(M) + 1.0)) / (M - 1.0);
      return out;
    }
  }
  return out;
}

/// SplitMix64: each (seed, index) pair gives an independent stream.
class SplitMix64 {
 public:
  SplitMix64(std::uint64_t seed, std::uint64_t index) : state_(seed ^ (index * 0xD1B54A32D192ED03ull)) {
    next();
  }
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Uniform integer in [1, 2^bits] drawn 64 bits at a time.
inline BigInt random_bits(SplitMix64& rng, int bits) {
  BigInt x = 0;
  int have = 0;
  while (have < bits) {
    x <<= 64;
    x += rng.next();
    have += 64;
  }
  x >>= (have - bits);
  return x + 1;
}

struct RealCltOptions {
  int bits = 256;        // seed denominator 2^bits (raised automatically when too small for n)
  std::uint64_t seed = 20240601;
  double mu_hat = 0;     // centring rate
  double delta_hat2 = 0; // variance rate from the spectral module
};

struct RealCltResult {
  int n = 0;
  int samples = 0;
  int bits = 0;
  int rejected = 0;
  double mean_rate = 0;  // mean of C_n / n
  double var_rate = 0;   // Var(C_n) / n
  double std_error = 0;  // standard error of the mean of C_n / n
  /// NaN when delta_hat2 is (numerically) zero, e.g. for constant costs.
  double ks = 0;
  std::vector<double> values;        // C_n per sample
  std::vector<double> standardized;  // (C_n - mu_hat n) / sqrt(delta_hat2 n), empty when degenerate
};

/// Draws seeds uniformly on I with denominator 2^bits and reports the
/// fluctuations of C_n against N(mu_hat n, delta_hat2 n).
inline RealCltResult real_clt_check(AlgorithmId id, const DigitCost& cost, int n, int samples,
                                    const RealCltOptions& opt) {
  if (samples < 1000) throw ConfigError("real_clt_check needs at least 1000 samples");
  if (n < 1) throw ConfigError("real_clt_check needs n >= 1");
  RealCltResult r;
  r.n = n;
  r.samples = samples;
  // Depth of a b-bit seed is about 0.58 b for G; keep a wide margin over n.
  r.bits = std::max(opt.bits, 4 * n);
  const int seed_bits = id == AlgorithmId::K ? r.bits - 1 : r.bits;
  const BigInt den = BigInt(1) << r.bits;
  std::uint64_t stream = 0;
  for (int i = 0; i < samples; ++i) {
    for (;;) {
      SplitMix64 rng(opt.seed, stream++);
      BigInt u = random_bits(rng, seed_bits);
      if (id == AlgorithmId::G && u == den) continue;
      try {
        const Rational x0(u, den);
        const BirkhoffResult b = birkhoff_sum(id, cost, x0, n);
        if (b.steps < n) {
          ++r.rejected;
          continue;
        }
        r.values.push_back(to_double(b.sum));
        break;
      } catch (const std::overflow_error&) {
        ++r.rejected;
      }
    }
  }
  double mean = 0;
  for (double c : r.values) mean += c;
  mean /= samples;
  double var = 0;
  for (double c : r.values) var += (c - mean) * (c - mean);
  var /= (samples - 1);
  r.mean_rate = mean / n;
  r.var_rate = var / n;
  r.std_error = std::sqrt(var / samples) / n;
  if (!(opt.delta_hat2 > 1e-9)) {
    r.ks = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  const double sd = std::sqrt(opt.delta_hat2 * n);
  for (double c : r.values) r.standardized.push_back((c - opt.mu_hat * n) / sd);
  r.ks = ks_to_normal(r.standardized);
  return r;
}

/// CSV with columns sample_index,Cn,standardized.
inline void write_real_csv(std::ostream& os, const RealCltResult& r) {
  os.precision(12);
  os << "sample_index,Cn,standardized\n";
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    os << i << ',' << r.values[i] << ',';
    if (i < r.standardized.size()) os << r.standardized[i];
    os << '\n';
  }
}

}  // namespace euclid
