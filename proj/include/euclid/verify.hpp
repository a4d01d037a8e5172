#pragma once

#include "euclid/cache.hpp"
#include "euclid/division.hpp"
#include "euclid/ensemble.hpp"
#include "euclid/realdyn.hpp"
#include "euclid/spectral.hpp"
#include "euclid/uni.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace euclid {

/// Bound on max_n |J(h, rho^{an})| / rho^{an} for the UNI check, fixed once.
inline constexpr double kUniConstant = 8.0;
/// Bound on TV(Pr_N, barPr_N) * N^{1/2} at gamma = 1/2, fixed once.
inline constexpr double kTvConstant = 2.0;

struct CheckRow {
  std::string check;
  double target = 0;
  double observed = 0;
  double tolerance = 0;
  bool pass = false;
};

struct CriterionReport {
  int id = 0;
  std::string title;
  std::vector<CheckRow> rows;
  double seconds = 0;
  std::string error;  // set when the criterion could not be evaluated

  bool pass() const {
    if (!error.empty() || rows.empty()) return false;
    for (const auto& r : rows) {
      if (!r.pass) return false;
    }
    return true;
  }
};

struct VerifyOptions {
  /// Algorithm for the enumeration, smoothing, real-trajectory and UNI criteria.
  AlgorithmId algo = AlgorithmId::G;
  const SummaryCache* cache = nullptr;
  std::uint64_t seed = 20240601;
  OperatorConfig spectral;
  std::vector<std::int64_t> growth_grid = {1 << 10, 1 << 11, 1 << 12, 1 << 13, 1 << 14, 1 << 15, 1 << 16, 1 << 17};
  std::vector<std::int64_t> clt_grid = {1000, 10000, 100000};
  std::int64_t identities_max_v = 300;
  std::vector<std::int64_t> tv_grid = {100, 1000, 10000};
  double gamma = 0.5;
  double quasi_power_nu = 0.05;
  int real_n = 200;
  int real_samples = 10000;
  std::vector<int> uni_depths = {2, 3, 4};
  double uni_a = 0.5;
  std::int64_t uni_m_cap = 30;
};

namespace detail {

inline CheckRow within(std::string check, double target, double observed, double tol) {
  return {std::move(check), target, observed, tol, std::abs(observed - target) <= tol};
}

inline CheckRow within_rel(std::string check, double target, double observed, double rel) {
  const double tol = rel * std::abs(target);
  return {std::move(check), target, observed, tol, std::abs(observed - target) <= tol};
}

inline CheckRow at_most(std::string check, double bound, double observed) {
  return {std::move(check), bound, observed, 0.0, observed <= bound};
}

inline CheckRow exact(std::string check, std::uint64_t failures) {
  return {std::move(check), 0.0, static_cast<double>(failures), 0.0, failures == 0};
}

}  // namespace detail

/// Runs the acceptance criteria. Spectral solvers and the step-count grid
/// are shared between criteria.
class Verifier {
 public:
  explicit Verifier(VerifyOptions opt = {}) : opt_(std::move(opt)) {}

  static const std::vector<std::string>& titles() {
    static const std::vector<std::string> t = {
        "entropy |Lambda'(1)| vs closed form",
        "invariant densities vs closed forms",
        "lambda(1,0) = 1",
        "digit frequencies Lambda'_w(1,0) vs closed form",
        "mean growth slope vs mu",
        "variance growth slope vs delta^2",
        "KS distance of standardized step counts",
        "local limit theorem at the largest N",
        "exact identities",
        "smoothing distance",
        "real-trajectory CLT",
        "quasi-power exponent",
        "UNI ratio",
    };
    return t;
  }

  /// Criteria by suite name for the CLI.
  static std::vector<int> suite(const std::string& name) {
    if (name == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13};
    if (name == "spectral") return {1, 2, 3, 4};
    if (name == "growth") return {5, 6, 12};
    if (name == "clt") return {7, 8};
    if (name == "identities") return {9};
    if (name == "smoothing") return {10};
    if (name == "real") return {11};
    if (name == "uni") return {13};
    throw ConfigError("unknown suite '" + name + "' (all|spectral|growth|clt|identities|smoothing|real|uni)");
  }

  CriterionReport run(int id) {
    CriterionReport rep;
    rep.id = id;
    if (id < 1 || id > 13) throw ConfigError("criterion id must be in 1..13");
    rep.title = titles()[static_cast<std::size_t>(id - 1)];
    const auto t0 = std::chrono::steady_clock::now();
    try {
      switch (id) {
        case 1: rep.rows = entropy(); break;
        case 2: rep.rows = densities(); break;
        case 3: rep.rows = lambda_one(); break;
        case 4: rep.rows = digit_frequencies(); break;
        case 5: rep.rows = mean_slope(); break;
        case 6: rep.rows = variance_slope(); break;
        case 7: rep.rows = ks(); break;
        case 8: rep.rows = llt(); break;
        case 9: rep.rows = identities(); break;
        case 10: rep.rows = smoothing(); break;
        case 11: rep.rows = real_clt(); break;
        case 12: rep.rows = quasi_power(); break;
        case 13: rep.rows = uni(); break;
      }
    } catch (const std::exception& e) {
      rep.error = e.what();
    }
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
  }

  const SpectralSolver& solver(AlgorithmId id, const DigitCost& cost) {
    const std::string key = std::string(name(id)) + "|" + cost.descriptor();
    auto it = solvers_.find(key);
    if (it == solvers_.end()) it = solvers_.emplace(key, std::make_unique<SpectralSolver>(id, cost, opt_.spectral)).first;
    return *it->second;
  }

  const ConstantsBundle& constants(AlgorithmId id, const DigitCost& cost) {
    const std::string key = std::string(name(id)) + "|" + cost.descriptor();
    auto it = bundles_.find(key);
    if (it == bundles_.end()) it = bundles_.emplace(key, solver(id, cost).constants()).first;
    return it->second;
  }

  /// Step-count summaries on Omega_N of the selected algorithm.
  const EnsembleSummary& step_summary(std::int64_t N) {
    if (!steps_.count(N)) {
      std::vector<std::int64_t> grid = opt_.growth_grid;
      grid.insert(grid.end(), opt_.clt_grid.begin(), opt_.clt_grid.end());
      grid.push_back(N);
      for (auto& s : cached_grid(opt_.cache, opt_.algo, DigitCost::unit(), grid)) steps_.emplace(s.set.N, std::move(s));
    }
    return steps_.at(N);
  }

 private:
  std::vector<CheckRow> entropy() {
    std::vector<CheckRow> rows;
    for (AlgorithmId id : kAllAlgorithms) {
      const double obs = std::abs(constants(id, DigitCost::unit()).dL_ds);
      rows.push_back(detail::within_rel("entropy " + std::string(name(id)), Algorithm::of(id).entropy(), obs,
                                        id == AlgorithmId::G ? 1e-6 : 1e-4));
    }
    return rows;
  }

  std::vector<CheckRow> densities() {
    std::vector<CheckRow> rows;
    for (AlgorithmId id : kAllAlgorithms) {
      const Algorithm algo = Algorithm::of(id);
      const FunctionModel f = solver(id, DigitCost::unit()).invariant_density();
      double worst = 0;
      for (int i = 0; i < 100; ++i) {
        const double x = algo.upper_double() * i / 99.0;
        worst = std::max(worst, std::abs(f(x) - algo.density(x)));
      }
      rows.push_back(detail::at_most("sup |f1 - density| " + std::string(name(id)),
                                     id == AlgorithmId::G ? 1e-10 : 1e-8, worst));
    }
    return rows;
  }

  std::vector<CheckRow> lambda_one() {
    std::vector<CheckRow> rows;
    for (AlgorithmId id : kAllAlgorithms) {
      rows.push_back(detail::within("lambda(1,0) " + std::string(name(id)), 1.0,
                                    solver(id, DigitCost::unit()).eigen(1.0, 0.0).lambda, 1e-9));
    }
    return rows;
  }

  std::vector<CheckRow> digit_frequencies() {
    std::vector<CheckRow> rows;
    for (AlgorithmId id : kAllAlgorithms) {
      for (std::int64_t m = 1; m <= 5; ++m) {
        const DigitCost c = DigitCost::indicator(m);
        const double obs = solver(id, c).dL_dw();
        const std::string label = "Lambda'_w indicator:" + std::to_string(m) + " " + std::string(name(id));
        if (id == AlgorithmId::G) {
          const double md = static_cast<double>(m);
          rows.push_back(detail::within(label, std::log2(1.0 + 1.0 / (md * (md + 2))), obs, 1e-6));
        } else {
          rows.push_back(detail::within(label, mu_hat_closed_form(id, c, opt_.spectral.m_cap).value, obs, 1e-7));
        }
      }
    }
    return rows;
  }

  std::pair<Regression, Regression> growth() {
    std::vector<EnsembleSummary> grid;
    for (auto N : opt_.growth_grid) grid.push_back(step_summary(N));
    return moment_regressions(grid);
  }

  std::vector<CheckRow> mean_slope() {
    const double mu = constants(opt_.algo, DigitCost::unit()).mu;
    return {detail::within_rel("slope of E_N[P] vs log N (" + std::string(name(opt_.algo)) + ")", mu,
                               growth().first.slope, 0.02)};
  }

  std::vector<CheckRow> variance_slope() {
    const double d2 = constants(opt_.algo, DigitCost::unit()).delta2;
    return {detail::within_rel("slope of V_N[P] vs log N (" + std::string(name(opt_.algo)) + ")", d2,
                               growth().second.slope, 0.10)};
  }

  std::vector<GaussianDiagnostics> diagnostics() {
    const auto& b = constants(opt_.algo, DigitCost::unit());
    std::vector<GaussianDiagnostics> out;
    for (auto N : opt_.clt_grid) out.push_back(gaussian_diagnostics(step_summary(N), b.mu_c, std::sqrt(b.delta2_c)));
    return out;
  }

  std::vector<CheckRow> ks() {
    const auto d = diagnostics();
    std::vector<CheckRow> rows;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double logN = std::log(static_cast<double>(opt_.clt_grid[i]));
      rows.push_back(detail::at_most("KS at N=" + std::to_string(opt_.clt_grid[i]), 1.2 / std::sqrt(logN), d[i].ks));
      if (i > 0) {
        rows.push_back(detail::at_most("KS non-increasing " + std::to_string(opt_.clt_grid[i - 1]) + "->" +
                                           std::to_string(opt_.clt_grid[i]),
                                       d[i - 1].ks, d[i].ks));
      }
    }
    return rows;
  }

  std::vector<CheckRow> llt() {
    const auto& b = constants(opt_.algo, DigitCost::unit());
    const std::int64_t N = opt_.clt_grid.back();
    const auto d = gaussian_diagnostics(step_summary(N), b.mu_c, std::sqrt(b.delta2_c));
    return {detail::at_most("LLT sup over |x|<=2 at N=" + std::to_string(N), 0.1, d.llt_sup(2.0))};
  }

  std::vector<CheckRow> identities() {
    const std::int64_t maxv = opt_.identities_max_v;
    std::vector<CheckRow> rows;
    for (AlgorithmId id : kAllAlgorithms) {
      const std::string tag = " " + std::string(name(id));
      std::uint64_t round_trip = 0, remainders = 0, determinant = 0, denominator = 0;
      std::vector<std::uint64_t> per_v(static_cast<std::size_t>(maxv + 1), 0);
      for (std::int64_t v = 1; v <= maxv; ++v) {
        for (std::int64_t u = 1; u <= v; ++u) {
          if (std::gcd(u, v) != 1 || !in_domain(id, u, v)) continue;
          ++per_v[static_cast<std::size_t>(v)];
          std::int64_t a = u, b = v;
          while (a != 0) {
            const auto s = divide<std::int64_t>(id, a, b);
            const bool ok = b == s.digit.m * a + s.digit.eps * s.remainder && s.remainder >= 0 &&
                            (s.remainder == 0 || in_domain(id, s.remainder, a));
            if (!ok) ++remainders;
            b = a;
            a = s.remainder;
          }
          const Trajectory t = decompose<std::int64_t>(id, u, v);
          const auto h = trajectory_lft<std::int64_t>(t);
          if (std::abs(h.det()) != 1) ++determinant;
          if (lft_denom(h, Rational(0)) != Rational(v)) ++denominator;
          if (reconstruct<std::int64_t>(t) != std::pair<std::int64_t, std::int64_t>{u, v}) ++round_trip;
        }
      }
      rows.push_back(detail::exact("round trip failures" + tag, round_trip));
      rows.push_back(detail::exact("remainder range failures" + tag, remainders));
      rows.push_back(detail::exact("determinant failures" + tag, determinant));
      rows.push_back(detail::exact("denominator law failures" + tag, denominator));

      const CoefficientTable table(id, DigitCost::binary_length(), maxv + 1);
      std::uint64_t phi0 = 0, psi_exact = 0, trans1 = 0;
      double psi_complex = 0;
      std::uint64_t omega = 0;
      const std::complex<double> z = table.z_of({0.3, 0.7});
      for (std::int64_t N = 1; N <= maxv; ++N) {
        omega += per_v[static_cast<std::size_t>(N)];
        const CountPolynomial p = table.phi(N);
        const BigInt total = std::accumulate(p.begin(), p.end(), BigInt(0));
        if (total != omega) ++phi0;
        const CountPolynomial a = table.psi(N), b = table.psi_from_phi(N);
        if (a != b) ++psi_exact;
        const auto ea = evaluate(a, z), eb = evaluate(b, z);
        if (std::abs(ea) > 0) psi_complex = std::max(psi_complex, std::abs(ea - eb) / std::abs(ea));
        const std::int64_t W = smoothing_window(N, opt_.gamma);
        if (W >= 1) {
          CountPolynomial diff = table.psi(N + 1);
          add_scaled(diff, table.psi(N - W), BigInt(-1));
          if (table.window_sum(N, W) != trimmed(diff)) ++trans1;
        }
      }
      rows.push_back(detail::exact("Phi_0 != |Omega_N|" + tag, phi0));
      rows.push_back(detail::exact("Psi by definition != sum of Phi" + tag, psi_exact));
      rows.push_back(detail::at_most("Psi complex relative error" + tag, 1e-12, psi_complex));
      rows.push_back(detail::exact("trans1 failures" + tag, trans1));
    }
    return rows;
  }

  std::vector<CheckRow> smoothing() {
    std::vector<CheckRow> rows;
    std::vector<double> tv;
    for (auto N : opt_.tv_grid) tv.push_back(smoothing_distance(opt_.algo, N, opt_.gamma));
    for (std::size_t i = 0; i < tv.size(); ++i) {
      const double scaled = tv[i] * std::pow(static_cast<double>(opt_.tv_grid[i]), opt_.gamma);
      rows.push_back(detail::at_most("TV * N^gamma at N=" + std::to_string(opt_.tv_grid[i]), kTvConstant, scaled));
      if (i > 0) {
        rows.push_back(detail::at_most("TV decreasing " + std::to_string(opt_.tv_grid[i - 1]) + "->" +
                                           std::to_string(opt_.tv_grid[i]),
                                       tv[i - 1], tv[i]));
      }
    }
    return rows;
  }

  std::vector<CheckRow> real_clt() {
    // Frequency of the smallest digit; for G its closed form is log2(4/3).
    const AlgorithmId id = opt_.algo;
    const DigitCost c = DigitCost::indicator(id == AlgorithmId::K ? 2 : 1);
    const auto& b = constants(id, c);
    RealCltOptions ro;
    ro.seed = opt_.seed;
    ro.mu_hat = mu_hat_closed_form(id, c).value;
    ro.delta_hat2 = b.delta_hat2;
    const auto r = real_clt_check(id, c, opt_.real_n, opt_.real_samples, ro);
    const double target = id == AlgorithmId::G ? std::log2(4.0 / 3.0) : ro.mu_hat;
    return {detail::within("mean of C_n/n vs mu^ (3 SE)", target, r.mean_rate, 3 * r.std_error),
            detail::at_most("KS to normal", 0.05, r.ks)};
  }

  std::vector<CheckRow> quasi_power() {
    const double nu = opt_.quasi_power_nu;
    std::vector<double> x, y;
    for (auto N : opt_.growth_grid) {
      x.push_back(std::log(static_cast<double>(N)));
      y.push_back(log_moment_generating(step_summary(N), nu));
    }
    const double slope = growth_regression(x, y).slope;
    const double target = 2 * (solver(opt_.algo, DigitCost::unit()).solve_sigma(nu) - 1);
    return {detail::within_rel("slope of log(Phi_nu/Phi_0) vs log N", target, slope, 0.05)};
  }

  std::vector<CheckRow> uni() {
    std::vector<CheckRow> rows;
    double prev = 0;
    for (std::size_t i = 0; i < opt_.uni_depths.size(); ++i) {
      const int n = opt_.uni_depths[i];
      const auto r = uni_check(opt_.algo, n, opt_.uni_a, opt_.uni_m_cap);
      rows.push_back(detail::at_most("worst ratio n=" + std::to_string(n), kUniConstant, r.worst_ratio));
      if (i > 0) rows.push_back(detail::at_most("ratio growth n=" + std::to_string(n), 2 * prev, r.worst_ratio));
      prev = r.worst_ratio;
    }
    return rows;
  }

  VerifyOptions opt_;
  std::map<std::string, std::unique_ptr<SpectralSolver>> solvers_;
  std::map<std::string, ConstantsBundle> bundles_;
  std::map<std::int64_t, EnsembleSummary> steps_;
};

/// One line per criterion: "criterion <id> PASS|FAIL <title> (<worst row>)".
inline std::string summary_line(const CriterionReport& r) {
  std::ostringstream os;
  os << "criterion " << r.id << ' ' << (r.pass() ? "PASS" : "FAIL") << "  " << r.title;
  if (!r.error.empty()) {
    os << "  (error: " << r.error << ')';
  } else {
    os.precision(6);
    const CheckRow* shown = nullptr;
    for (const auto& row : r.rows) {
      if (!row.pass) {
        shown = &row;
        break;
      }
    }
    if (!shown && !r.rows.empty()) shown = &r.rows.back();
    if (shown) os << "  [" << shown->check << ": observed " << shown->observed << ", target " << shown->target << ']';
    os.precision(3);
    os << "  " << std::fixed << r.seconds << 's';
  }
  return os.str();
}

/// CSV rows: criterion,check,target,observed,tolerance,status.
inline void write_report_csv(std::ostream& os, const std::vector<CriterionReport>& reports) {
  os.precision(12);
  os << "criterion,check,target,observed,tolerance,status\n";
  for (const auto& r : reports) {
    if (!r.error.empty()) {
      os << r.id << ",\"error: " << r.error << "\",,,,fail\n";
      continue;
    }
    for (const auto& row : r.rows) {
      os << r.id << ",\"" << row.check << "\"," << row.target << ',' << row.observed << ',' << row.tolerance << ','
         << (row.pass ? "pass" : "fail") << '\n';
    }
  }
}

}  // namespace euclid
