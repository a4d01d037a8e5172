#pragma once

#include "euclid/algorithm.hpp"
#include "euclid/cost.hpp"
#include "euclid/division.hpp"
#include "euclid/errors.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

namespace euclid {

/// Omega_N (reduced = true) or Omega~_N (reduced = false) for one algorithm.
struct InputSet {
  AlgorithmId algo = AlgorithmId::G;
  std::int64_t N = 1;
  bool reduced = true;
};

/// Range of u for a given v: all u with u/v in I'.
inline std::pair<std::int64_t, std::int64_t> numerator_range(AlgorithmId id, std::int64_t v) {
  switch (id) {
    case AlgorithmId::G: return {1, v - 1};
    case AlgorithmId::K: return {1, v / 2};
    case AlgorithmId::O: return {1, v};
  }
  return {1, 0};
}

/// Calls f(u, v) for every pair of the set, v ascending then u ascending.
template <class F>
void for_each_input(const InputSet& set, F&& f) {
  if (set.N < 1) throw ConfigError("input set bound N must be >= 1");
  for (std::int64_t v = 1; v <= set.N; ++v) {
    const auto [lo, hi] = numerator_range(set.algo, v);
    for (std::int64_t u = lo; u <= hi; ++u) {
      if (set.reduced && std::gcd(u, v) != 1) continue;
      f(u, v);
    }
  }
}

/// Calls f(u, v, weight) over reduced pairs only; weight is 1 for Omega_N and
/// floor(N/v) for Omega~_N (every (du, dv) has the digits of (u, v)).
template <class F>
void for_each_weighted_input(const InputSet& set, F&& f) {
  InputSet reduced = set;
  reduced.reduced = true;
  for_each_input(reduced, [&](std::int64_t u, std::int64_t v) {
    f(u, v, set.reduced ? std::uint64_t{1} : static_cast<std::uint64_t>(set.N / v));
  });
}

inline std::uint64_t input_count(const InputSet& set) {
  std::uint64_t n = 0;
  for_each_weighted_input(set, [&](std::int64_t, std::int64_t, std::uint64_t w) { n += w; });
  return n;
}

namespace detail {

// Smallest denominator of a rational in Omega: 2 for G and K, 1 for O.
inline std::int64_t min_input_denominator(AlgorithmId id) { return id == AlgorithmId::O ? 1 : 2; }

/// Depth-first walk over composed branches h in H* by their denominator row
/// (c, d); appending digit (m, eps) maps the row to (eps d, c + m d). A final
/// digit emits v = c + m d, which enumerates Omega_N exactly once per pair.
template <class Sink>
struct StandardWalker {
  std::int64_t N;
  const std::int32_t* units;
  Sink& sink;

  void walk(std::int64_t c, std::int64_t d, std::int32_t j) {
    // Children of (d, dn) emit at least d + 2 dn; rows grow strictly.
    std::int64_t m = 1;
    for (;; ++m) {
      const std::int64_t dn = c + m * d;
      if (d + 2 * dn > N) break;
      const std::int32_t jj = j + units[m];
      if (m >= 2) sink(dn, jj);
      walk(d, dn, jj);
    }
    for (;; ++m) {
      const std::int64_t dn = c + m * d;
      if (dn > N) break;
      if (m >= 2) sink(dn, j + units[m]);
    }
  }
};

template <class Sink>
struct SignedWalker {
  AlgorithmId id;
  std::int64_t N;
  const std::int32_t* plus;
  const std::int32_t* minus;
  Sink& sink;
  std::int64_t first_m, step, d_min;

  // d_min * min over I of (c' y + d'), doubled for K so that it stays integral.
  bool child_reachable(std::int64_t c2, std::int64_t d2) const {
    if (id == AlgorithmId::K) return d_min * (2 * d2 + std::min<std::int64_t>(c2, 0)) <= 2 * N;
    return d_min * (d2 + std::min<std::int64_t>(c2, 0)) <= N;
  }

  void walk(std::int64_t c, std::int64_t d, std::int32_t j) {
    const Algorithm algo = Algorithm::of(id);
    for (std::int64_t m = first_m;; m += step) {
      const std::int64_t dn = c + m * d;
      // The endpoint digit ((2,+1) for K, (1,+1) for O) ends at x = 1/2 or
      // x = 1, which division only reaches after an eps = -1 digit.
      const bool emit = dn <= N && (m != first_m || c <= 0);
      const bool plus_child = child_reachable(d, dn);
      const bool minus_ok = algo.generic(Digit{m, -1});
      const bool minus_child = minus_ok && child_reachable(-d, dn);
      if (dn > N && !minus_child && !plus_child) {
        // Both bounds increase with m.
        if (!child_reachable(-d, dn)) break;
        continue;
      }
      const std::int32_t jp = j + plus[m];
      if (emit) sink(dn, jp);
      if (plus_child) walk(d, dn, jp);
      if (minus_child) walk(-d, dn, j + minus[m]);
    }
  }
};

}  // namespace detail

/// Production enumeration: sink(v, j) once for every (u, v) in Omega_N, where
/// j is the total cost in units of the lattice span.
template <class Sink>
void walk_branch_tree(AlgorithmId id, const LatticeCost& cost, std::int64_t N, Sink&& sink) {
  if (N < 1) throw ConfigError("input set bound N must be >= 1");
  if (cost.m_max() < N + 1) throw ConfigError("lattice cost table shorter than N + 1");
  if (id == AlgorithmId::G) {
    detail::StandardWalker<Sink> w{N, cost.plus_data(), sink};
    w.walk(0, 1, 0);
    return;
  }
  detail::SignedWalker<Sink> w{id,
                               N,
                               cost.plus_data(),
                               cost.minus_data(),
                               sink,
                               id == AlgorithmId::K ? 2 : 1,
                               id == AlgorithmId::K ? 1 : 2,
                               detail::min_input_denominator(id)};
  w.walk(0, 1, 0);
}

/// Oracle enumeration: v ascending, u ascending, gcd filter, explicit divisions.
template <class Sink>
void walk_by_division(AlgorithmId id, const LatticeCost& cost, std::int64_t N, Sink&& sink) {
  if (cost.m_max() < N + 1) throw ConfigError("lattice cost table shorter than N + 1");
  for_each_input(InputSet{id, N, true}, [&](std::int64_t u, std::int64_t v) {
    std::int32_t j = 0;
    std::int64_t a = u, b = v;
    while (a != 0) {
      const DivisionStep<std::int64_t> s = divide(id, a, b);
      j += cost.units(s.digit.m, s.digit.eps);
      b = a;
      a = s.remainder;
    }
    sink(v, j);
  });
}

enum class EnumerationRoute { BranchTree, Division };

/// Histograms of the lattice total cost j, grouped by v into the buckets
/// (edges[i-1], edges[i]]. Cumulating the first i+1 buckets gives Omega_{edges[i]}.
struct BucketedHistograms {
  std::vector<std::int64_t> edges;
  std::vector<std::vector<std::uint64_t>> counts;
  Rational span = 1;

  /// Histogram of Omega_{edges[i]}.
  std::vector<std::uint64_t> cumulative(std::size_t i) const {
    std::vector<std::uint64_t> out;
    for (std::size_t b = 0; b <= i; ++b) {
      if (counts[b].size() > out.size()) out.resize(counts[b].size(), 0);
      for (std::size_t j = 0; j < counts[b].size(); ++j) out[j] += counts[b][j];
    }
    return out;
  }
};

inline BucketedHistograms bucketed_histograms(AlgorithmId id, const DigitCost& cost,
                                              std::vector<std::int64_t> edges,
                                              EnumerationRoute route = EnumerationRoute::BranchTree) {
  if (edges.empty()) throw ConfigError("no bucket edges");
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  if (edges.front() < 1) throw ConfigError("bucket edges must be >= 1");
  const std::int64_t N = edges.back();
  const LatticeCost lattice(cost, id, N + 1);

  BucketedHistograms out;
  out.edges = edges;
  out.span = lattice.span();
  out.counts.assign(edges.size(), {});
  std::vector<std::uint32_t> bucket_of(static_cast<std::size_t>(N + 1), 0);
  std::size_t b = 0;
  for (std::int64_t v = 1; v <= N; ++v) {
    while (edges[b] < v) ++b;
    bucket_of[static_cast<std::size_t>(v)] = static_cast<std::uint32_t>(b);
  }
  auto sink = [&](std::int64_t v, std::int32_t j) {
    auto& h = out.counts[bucket_of[static_cast<std::size_t>(v)]];
    const auto jj = static_cast<std::size_t>(j);
    if (jj >= h.size()) h.resize(jj + 1, 0);
    ++h[jj];
  };
  if (route == EnumerationRoute::BranchTree) {
    walk_branch_tree(id, lattice, N, sink);
  } else {
    walk_by_division(id, lattice, N, sink);
  }
  return out;
}

/// Per-denominator histograms c_v[j] for v = 1..N (index 0 unused).
inline BucketedHistograms per_denominator_histograms(AlgorithmId id, const DigitCost& cost,
                                                     std::int64_t N,
                                                     EnumerationRoute route = EnumerationRoute::BranchTree) {
  std::vector<std::int64_t> edges(static_cast<std::size_t>(N));
  std::iota(edges.begin(), edges.end(), std::int64_t{1});
  return bucketed_histograms(id, cost, std::move(edges), route);
}

}  // namespace euclid
