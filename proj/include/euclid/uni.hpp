#pragma once

#include "euclid/algorithm.hpp"
#include "euclid/errors.hpp"
#include "euclid/lft.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace euclid {

/// Result of a UNI check at one depth.
struct UniResult {
  AlgorithmId algo = AlgorithmId::G;
  int depth = 0;
  double a = 0.5;
  std::int64_t m_cap = 0;
  double eta = 0;               // rho^{a n}
  std::size_t branches = 0;     // size of the truncated H^n
  double tail = 0;              // measure of the depth-n cylinders with a digit > m_cap
  double worst_truncated = 0;   // max_h |J(h, eta)| / eta over truncated branches only
  double worst_ratio = 0;       // same with the tail added (an upper bound)
};

namespace detail {

struct BranchRow {
  double t;       // c / d
  double length;  // |k(I)|
  std::int64_t c, d;
};

inline void collect_branches(const Algorithm& algo, int depth, std::int64_t m_cap, std::int64_t c,
                             std::int64_t d, std::vector<BranchRow>& out) {
  if (depth == 0) {
    const double xm = algo.upper_double();
    const double dd = static_cast<double>(d), cc = static_cast<double>(c);
    out.push_back({cc / dd, xm / (dd * (cc * xm + dd)), c, d});
    return;
  }
  for (std::int64_t m = 1; m <= m_cap; ++m) {
    for (int eps : {+1, -1}) {
      if (!algo.generic({m, eps})) continue;
      collect_branches(algo, depth - 1, m_cap, eps * d, c + m * d, out);
    }
  }
}

/// Delta between two branches given by their bottom rows, in floating point
/// (endpoints and vertex of the product of denominators).
inline double row_delta(const BranchRow& h, const BranchRow& k, double x_max) {
  const double c1 = static_cast<double>(h.c), d1 = static_cast<double>(h.d);
  const double c2 = static_cast<double>(k.c), d2 = static_cast<double>(k.d);
  const double num = std::abs(c1 * d2 - c2 * d1);
  if (num == 0) return 0;
  auto q = [&](double x) { return std::abs((c1 * x + d1) * (c2 * x + d2)); };
  double best = std::max(q(0), q(x_max));
  if (c1 * c2 != 0) {
    const double v = -(c1 * d2 + c2 * d1) / (2 * c1 * c2);
    if (v > 0 && v < x_max) best = std::max(best, q(v));
  }
  return num / best;
}

}  // namespace detail

/// Branches of depth n with digits m <= m_cap, as (t = c/d, |k(I)|) rows.
inline std::vector<detail::BranchRow> truncated_branches(AlgorithmId id, int depth, std::int64_t m_cap) {
  std::vector<detail::BranchRow> rows;
  detail::collect_branches(Algorithm::of(id), depth, m_cap, 0, 1, rows);
  return rows;
}

/// Worst ratio |J(h, eta)| / eta over the truncated H^n with eta = rho^{a n}.
/// J(h, eta) is the union of k(I) over k with Delta(h, k) <= eta; cylinders of
/// one depth are disjoint, so its measure is a sum of lengths.
inline UniResult uni_check(AlgorithmId id, int depth, double a, std::int64_t m_cap) {
  if (depth < 1 || depth > 6) throw ConfigError("uni_check depth must be in 1..6");
  if (m_cap < 2 || m_cap > 50) throw ConfigError("uni_check m_cap must be in 2..50");
  if (!(a > 0 && a < 1)) throw ConfigError("uni_check exponent a must lie in (0, 1)");
  const Algorithm algo = Algorithm::of(id);
  const double x_max = algo.upper_double();

  UniResult r;
  r.algo = id;
  r.depth = depth;
  r.a = a;
  r.m_cap = m_cap;
  r.eta = std::pow(algo.contraction_ratio(), a * depth);

  auto rows = truncated_branches(id, depth, m_cap);
  std::sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) { return x.t < y.t; });
  r.branches = rows.size();
  std::vector<double> prefix(rows.size() + 1, 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) prefix[i + 1] = prefix[i] + rows[i].length;
  r.tail = std::max(0.0, x_max - prefix.back());

  // Along t-sorted rows Delta(h, k) grows as t_k moves away from t_h on either
  // side, so J(h, eta) is a run of consecutive rows found by two binary searches.
  const double eta = r.eta;
  double worst = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& h = rows[i];
    auto first = std::partition_point(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(i),
                                      [&](const auto& k) { return detail::row_delta(h, k, x_max) > eta; });
    auto last = std::partition_point(rows.begin() + static_cast<std::ptrdiff_t>(i), rows.end(),
                                     [&](const auto& k) { return detail::row_delta(h, k, x_max) <= eta; });
    const double measure = prefix[static_cast<std::size_t>(last - rows.begin())] -
                           prefix[static_cast<std::size_t>(first - rows.begin())];
    worst = std::max(worst, measure);
  }
  r.worst_truncated = worst / eta;
  r.worst_ratio = (worst + r.tail) / eta;
  return r;
}

/// Brute-force |J(h, eta)| for one branch index, used as an oracle.
inline double uni_measure_bruteforce(AlgorithmId id, const std::vector<detail::BranchRow>& rows, std::size_t i,
                                     double eta) {
  const double x_max = Algorithm::of(id).upper_double();
  double m = 0;
  for (const auto& k : rows) {
    if (detail::row_delta(rows[i], k, x_max) <= eta) m += k.length;
  }
  return m;
}

}  // namespace euclid
