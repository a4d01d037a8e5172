#pragma once

#include "euclid/cost.hpp"
#include "euclid/enumerate.hpp"
#include "euclid/errors.hpp"
#include "euclid/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

namespace euclid {

/// Exact cost distribution on one input set.
struct EnsembleSummary {
  InputSet set;
  std::string cost_id;
  Rational span = 1;
  std::uint64_t count = 0;
  /// j -> number of inputs with C = j * span (weighted by floor(N/v) for Omega~).
  std::map<std::int64_t, std::uint64_t> histogram;
  /// Raw moments E_N[C^k], k = 1..k_max; moments[0] is E[C^0] = 1.
  std::vector<Rational> moments;

  double mean() const { return to_double(moments.at(1)); }
  double variance() const {
    const Rational m1 = moments.at(1);
    return to_double(Rational(moments.at(2) - m1 * m1));
  }
};

namespace detail {
inline std::vector<std::uint64_t> dense(const std::map<std::int64_t, std::uint64_t>& h) {
  std::vector<std::uint64_t> out(h.empty() ? 0 : static_cast<std::size_t>(h.rbegin()->first + 1), 0);
  for (const auto& [j, c] : h) out[static_cast<std::size_t>(j)] = c;
  return out;
}
}  // namespace detail

/// Builds the summary (count and exact moments) from a lattice histogram.
inline EnsembleSummary make_summary(const InputSet& set, const std::string& cost_id, const Rational& span,
                                    const std::vector<std::uint64_t>& hist, int k_max = 4) {
  if (k_max < 2) throw ConfigError("k_max must be >= 2");
  EnsembleSummary s;
  s.set = set;
  s.cost_id = cost_id;
  s.span = span;
  std::vector<BigInt> power_sums(static_cast<std::size_t>(k_max + 1), 0);
  for (std::size_t j = 0; j < hist.size(); ++j) {
    if (hist[j] == 0) continue;
    s.histogram[static_cast<std::int64_t>(j)] = hist[j];
    s.count += hist[j];
    BigInt term = hist[j];
    for (int k = 0; k <= k_max; ++k) {
      power_sums[static_cast<std::size_t>(k)] += term;
      term *= static_cast<std::uint64_t>(j);
    }
  }
  s.moments.assign(static_cast<std::size_t>(k_max + 1), Rational(0));
  if (s.count == 0) return s;
  Rational lk = 1;
  for (int k = 0; k <= k_max; ++k) {
    s.moments[static_cast<std::size_t>(k)] = lk * Rational(power_sums[static_cast<std::size_t>(k)], BigInt(s.count));
    lk *= span;
  }
  return s;
}

/// Lattice histogram of an input set by full enumeration. Omega~_N reuses the
/// reduced pairs with weight floor(N/v).
inline std::vector<std::uint64_t> input_histogram(const InputSet& set, const DigitCost& cost,
                                                  Rational* span_out = nullptr) {
  if (set.N < 1) throw ConfigError("input set bound N must be >= 1");
  const LatticeCost lattice(cost, set.algo, set.N + 1);
  if (span_out) *span_out = lattice.span();
  std::vector<std::uint64_t> hist;
  walk_branch_tree(set.algo, lattice, set.N, [&](std::int64_t v, std::int32_t j) {
    const auto jj = static_cast<std::size_t>(j);
    if (jj >= hist.size()) hist.resize(jj + 1, 0);
    hist[jj] += set.reduced ? 1 : static_cast<std::uint64_t>(set.N / v);
  });
  return hist;
}

inline EnsembleSummary summarize(const InputSet& set, const DigitCost& cost, int k_max = 4) {
  Rational span;
  const auto hist = input_histogram(set, cost, &span);
  return make_summary(set, cost.descriptor(), span, hist, k_max);
}

/// Summaries of Omega_N for every N of a grid, from one enumeration pass.
inline std::vector<EnsembleSummary> summarize_grid(AlgorithmId id, const DigitCost& cost,
                                                   const std::vector<std::int64_t>& grid, int k_max = 4) {
  const BucketedHistograms b = bucketed_histograms(id, cost, grid);
  std::vector<EnsembleSummary> out;
  std::vector<std::uint64_t> acc;
  for (std::size_t i = 0; i < b.edges.size(); ++i) {
    if (b.counts[i].size() > acc.size()) acc.resize(b.counts[i].size(), 0);
    for (std::size_t j = 0; j < b.counts[i].size(); ++j) acc[j] += b.counts[i][j];
    out.push_back(make_summary(InputSet{id, b.edges[i], true}, cost.descriptor(), b.span, acc, k_max));
  }
  return out;
}

/// Phi_w(N) = sum over the set of exp(w C).
inline std::complex<double> phi(const EnsembleSummary& s, std::complex<double> w) {
  std::complex<double> sum = 0;
  const double L = to_double(s.span);
  for (const auto& [j, c] : s.histogram) sum += static_cast<double>(c) * std::exp(w * (L * static_cast<double>(j)));
  return sum;
}

/// log E_N[exp(nu C)] for real nu, evaluated stably around the largest term.
inline double log_moment_generating(const EnsembleSummary& s, double nu) {
  if (s.count == 0) throw DegenerateError("empty input set");
  const double L = to_double(s.span);
  double top = -1e300;
  for (const auto& [j, c] : s.histogram) top = std::max(top, nu * L * static_cast<double>(j));
  double sum = 0;
  for (const auto& [j, c] : s.histogram) sum += static_cast<double>(c) * std::exp(nu * L * static_cast<double>(j) - top);
  return top + std::log(sum / static_cast<double>(s.count));
}

/// Polynomial in z = exp(w L) with integer coefficients.
using CountPolynomial = std::vector<BigInt>;

inline CountPolynomial& add_scaled(CountPolynomial& acc, const CountPolynomial& p, const BigInt& factor = 1) {
  if (p.size() > acc.size()) acc.resize(p.size(), 0);
  for (std::size_t j = 0; j < p.size(); ++j) acc[j] += factor * p[j];
  return acc;
}

inline CountPolynomial trimmed(CountPolynomial p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
  return p;
}

inline std::complex<double> evaluate(const CountPolynomial& p, std::complex<double> z) {
  std::complex<double> acc = 0;
  for (std::size_t j = p.size(); j-- > 0;) acc = acc * z + to_double(p[j]);
  return acc;
}

/// Per-denominator Dirichlet coefficients c_n(w) = sum over (u, n) of exp(w C),
/// kept as integer polynomials in z = exp(w L) for n = 1..N.
class CoefficientTable {
 public:
  CoefficientTable(AlgorithmId id, const DigitCost& cost, std::int64_t N,
                   EnumerationRoute route = EnumerationRoute::BranchTree)
      : id_(id), N_(N) {
    const BucketedHistograms h = per_denominator_histograms(id, cost, N, route);
    span_ = h.span;
    coeffs_.resize(static_cast<std::size_t>(N + 1));
    for (std::int64_t n = 1; n <= N; ++n) {
      const auto& src = h.counts[static_cast<std::size_t>(n - 1)];
      coeffs_[static_cast<std::size_t>(n)] = CountPolynomial(src.begin(), src.end());
    }
  }

  AlgorithmId algo() const { return id_; }
  std::int64_t N() const { return N_; }
  const Rational& span() const { return span_; }

  /// c_n as a polynomial; zero for n outside 1..N.
  CountPolynomial coefficient(std::int64_t n) const {
    if (n < 1 || n > N_) return {};
    return coeffs_[static_cast<std::size_t>(n)];
  }

  /// Phi(Q) = sum_{n <= Q} c_n.
  CountPolynomial phi(std::int64_t Q) const {
    check(Q);
    CountPolynomial acc;
    for (std::int64_t n = 1; n <= Q; ++n) add_scaled(acc, coeffs_[static_cast<std::size_t>(n)]);
    return trimmed(acc);
  }

  /// Psi(T) = sum_{n <= T} c_n (T - n), by definition.
  CountPolynomial psi(std::int64_t T) const {
    check(T - 1);
    CountPolynomial acc;
    for (std::int64_t n = 1; n <= T; ++n) add_scaled(acc, coefficient(n), BigInt(T - n));
    return trimmed(acc);
  }

  /// Psi(T) rebuilt as the sum of Phi(Q) over Q < T.
  CountPolynomial psi_from_phi(std::int64_t T) const {
    check(T - 1);
    CountPolynomial acc;
    for (std::int64_t Q = 1; Q < T; ++Q) add_scaled(acc, phi(Q));
    return trimmed(acc);
  }

  /// W * barPhi(N) = sum_{Q = N-W}^{N} Phi(Q), i.e. the smoothed sum without its 1/W.
  CountPolynomial window_sum(std::int64_t N, std::int64_t W) const {
    CountPolynomial acc;
    for (std::int64_t Q = std::max<std::int64_t>(N - W, 1); Q <= N; ++Q) add_scaled(acc, phi(Q));
    return trimmed(acc);
  }

  std::complex<double> z_of(std::complex<double> w) const { return std::exp(w * to_double(span_)); }

 private:
  void check(std::int64_t Q) const {
    if (Q > N_) throw ConfigError("coefficient table too short for the requested bound");
  }

  AlgorithmId id_;
  std::int64_t N_;
  Rational span_ = 1;
  std::vector<CountPolynomial> coeffs_;
};

/// Width W = floor(N^{1 - gamma}) of the smoothing window.
inline std::int64_t smoothing_window(std::int64_t N, double gamma) {
  if (!(gamma > 0)) throw ConfigError("gamma must be positive");
  return static_cast<std::int64_t>(std::floor(std::pow(static_cast<double>(N), 1.0 - gamma) + 1e-9));
}

/// Two-stage model: Q uniform on {N-W, ..., N}, then uniform on Omega_Q.
struct SmoothedSummary {
  InputSet set;
  double gamma = 0.5;
  std::int64_t window = 0;
  std::vector<std::int64_t> Qs;  // components with nonempty Omega_Q
  std::vector<std::uint64_t> sizes;  // |Omega_Q|
  Rational span = 1;
  /// Exact mixture probability of C = j * span.
  std::map<std::int64_t, Rational> mixture;
  std::vector<Rational> moments;

  double mean() const { return to_double(moments.at(1)); }
  double variance() const { return to_double(Rational(moments.at(2) - moments.at(1) * moments.at(1))); }
};

inline SmoothedSummary smoothed(const InputSet& set, const DigitCost& cost, double gamma, int k_max = 4) {
  if (!set.reduced) throw ConfigError("smoothing is defined on Omega_N");
  const std::int64_t W = smoothing_window(set.N, gamma);
  if (W < 1) throw DegenerateError("degenerate smoothing window: floor(N^(1-gamma)) = 0");
  SmoothedSummary out;
  out.set = set;
  out.gamma = gamma;
  out.window = W;
  std::vector<std::int64_t> edges;
  for (std::int64_t Q = std::max<std::int64_t>(set.N - W, 1); Q <= set.N; ++Q) edges.push_back(Q);
  const BucketedHistograms b = bucketed_histograms(set.algo, cost, edges);
  out.span = b.span;
  std::vector<std::vector<std::uint64_t>> per_q;
  for (std::size_t i = 0; i < b.edges.size(); ++i) {
    auto h = b.cumulative(i);
    std::uint64_t n = 0;
    for (auto c : h) n += c;
    if (n == 0) continue;
    out.Qs.push_back(b.edges[i]);
    out.sizes.push_back(n);
    per_q.push_back(std::move(h));
  }
  if (out.Qs.empty()) throw DegenerateError("every Omega_Q in the smoothing window is empty");
  const Rational wq(1, static_cast<std::int64_t>(out.Qs.size()));
  for (std::size_t i = 0; i < per_q.size(); ++i) {
    for (std::size_t j = 0; j < per_q[i].size(); ++j) {
      if (per_q[i][j] == 0) continue;
      out.mixture[static_cast<std::int64_t>(j)] += wq * Rational(per_q[i][j], out.sizes[i]);
    }
  }
  out.moments.assign(static_cast<std::size_t>(k_max + 1), Rational(0));
  for (const auto& [j, p] : out.mixture) {
    Rational x = p;
    const Rational c = out.span * j;
    for (int k = 0; k <= k_max; ++k) {
      out.moments[static_cast<std::size_t>(k)] += x;
      x *= c;
    }
  }
  return out;
}

/// 1/2 sum |p - q| over a common support.
inline double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw ConfigError("total_variation needs equally sized supports");
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

/// TV between the uniform law on Omega_N and the smoothed law at exponent gamma.
/// Both depend on (u, v) only through v, so the sum runs over v with weight n_v.
inline double smoothing_distance(AlgorithmId id, std::int64_t N, double gamma) {
  const std::int64_t W = smoothing_window(N, gamma);
  if (W < 1) throw DegenerateError("degenerate smoothing window: floor(N^(1-gamma)) = 0");
  std::vector<std::uint64_t> per_v(static_cast<std::size_t>(N + 1), 0);
  const LatticeCost lattice(DigitCost::unit(), id, N + 1);
  walk_branch_tree(id, lattice, N, [&](std::int64_t v, std::int32_t) { ++per_v[static_cast<std::size_t>(v)]; });
  std::vector<std::uint64_t> omega(static_cast<std::size_t>(N + 1), 0);
  for (std::int64_t Q = 1; Q <= N; ++Q) omega[static_cast<std::size_t>(Q)] = omega[static_cast<std::size_t>(Q - 1)] + per_v[static_cast<std::size_t>(Q)];

  std::vector<std::int64_t> Qs;
  for (std::int64_t Q = std::max<std::int64_t>(N - W, 1); Q <= N; ++Q) {
    if (omega[static_cast<std::size_t>(Q)] > 0) Qs.push_back(Q);
  }
  const double wq = 1.0 / static_cast<double>(Qs.size());
  const double p = 1.0 / static_cast<double>(omega[static_cast<std::size_t>(N)]);
  double tv = 0;
  // q_v = wq * sum over window Q >= v of 1/|Omega_Q|, a suffix sum in v.
  std::size_t next = Qs.size();
  double suffix = 0;
  for (std::int64_t v = N; v >= 1; --v) {
    while (next > 0 && Qs[next - 1] >= v) {
      --next;
      suffix += wq / static_cast<double>(omega[static_cast<std::size_t>(Qs[next])]);
    }
    tv += static_cast<double>(per_v[static_cast<std::size_t>(v)]) * std::abs(p - suffix);
  }
  return 0.5 * tv;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

struct LltRow {
  std::int64_t j = 0;
  double x = 0;
  double scaled_prob = 0;
  double gauss = 0;
};

struct GaussianDiagnostics {
  double ks = 0;
  std::vector<LltRow> llt;

  /// sup |scaled_prob - gauss| over rows with |x| <= x_max.
  double llt_sup(double x_max) const {
    double worst = 0;
    for (const auto& r : llt) {
      if (std::abs(r.x) <= x_max) worst = std::max(worst, std::abs(r.scaled_prob - r.gauss));
    }
    return worst;
  }
};

/// KS distance of (C - mu log N)/(delta sqrt(log N)) to N(0,1), and the LLT table.
inline GaussianDiagnostics gaussian_diagnostics(const EnsembleSummary& s, double mu_c, double delta_c) {
  if (!(delta_c > 0)) throw ConfigError("gaussian_diagnostics needs delta_c > 0");
  if (s.histogram.size() < 2) throw DegenerateError("degenerate variance: histogram has a single bin");
  const double logN = std::log(static_cast<double>(s.set.N));
  const double scale = delta_c * std::sqrt(logN);
  const double L = to_double(s.span);
  const double total = static_cast<double>(s.count);
  GaussianDiagnostics out;
  double below = 0;
  for (const auto& [j, c] : s.histogram) {
    const double x = (L * static_cast<double>(j) - mu_c * logN) / scale;
    const double g = normal_cdf(x);
    const double left = below / total;
    below += static_cast<double>(c);
    const double right = below / total;
    out.ks = std::max({out.ks, std::abs(left - g), std::abs(right - g)});
    const double prob = static_cast<double>(c) / total;
    out.llt.push_back({j, x, scale * std::sqrt(2 * std::numbers::pi) / L * prob, std::exp(-x * x / 2)});
  }
  return out;
}

/// KS distance of an arbitrary sample to N(0,1).
inline double ks_to_normal(std::vector<double> z) {
  if (z.empty()) throw DegenerateError("empty sample");
  std::sort(z.begin(), z.end());
  const double n = static_cast<double>(z.size());
  double ks = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double g = normal_cdf(z[i]);
    ks = std::max({ks, std::abs(static_cast<double>(i) / n - g), std::abs(static_cast<double>(i + 1) / n - g)});
  }
  return ks;
}

struct Regression {
  double slope = 0;
  double intercept = 0;
  double residual = 0;  // root mean square
};

/// Ordinary least squares y = slope * x + intercept.
inline Regression growth_regression(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) throw ConfigError("growth_regression needs >= 3 paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw DegenerateError("growth_regression: all x values coincide");
  Regression r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (r.slope * x[i] + r.intercept);
    ss += e * e;
  }
  r.residual = std::sqrt(ss / n);
  return r;
}

/// Regression of mean and variance against log N over a list of summaries.
inline std::pair<Regression, Regression> moment_regressions(const std::vector<EnsembleSummary>& grid) {
  std::vector<double> x, m, v;
  for (const auto& s : grid) {
    x.push_back(std::log(static_cast<double>(s.set.N)));
    m.push_back(s.mean());
    v.push_back(s.variance());
  }
  return {growth_regression(x, m), growth_regression(x, v)};
}

/// CSV with columns j,cost_value,count.
inline void write_histogram_csv(std::ostream& os, const EnsembleSummary& s) {
  os << "j,cost_value,count\n";
  for (const auto& [j, c] : s.histogram) os << j << ',' << to_string(s.span * j) << ',' << c << '\n';
}

/// CSV with columns x,scaled_prob,gauss_density.
inline void write_llt_csv(std::ostream& os, const GaussianDiagnostics& g) {
  os.precision(12);
  os << "x,scaled_prob,gauss_density\n";
  for (const auto& r : g.llt) os << r.x << ',' << r.scaled_prob << ',' << r.gauss << '\n';
}

}  // namespace euclid
