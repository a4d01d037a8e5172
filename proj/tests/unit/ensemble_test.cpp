#include "euclid/cache.hpp"
#include "euclid/division.hpp"
#include "euclid/ensemble.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <unistd.h>

using namespace euclid;

namespace {

// Cost of every pair of the set, computed pair by pair with the division rule.
// For Omega~ the non-reduced pairs are decomposed directly.
std::vector<Rational> direct_costs(const InputSet& set, const DigitCost& cost) {
  std::vector<Rational> out;
  for_each_input(set, [&](std::int64_t u, std::int64_t v) {
    out.push_back(total_cost(cost, decompose(set.algo, u, v)));
  });
  return out;
}

std::filesystem::path fresh_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() / ("euclid-test-" + tag + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST(Summary, SmallExamples) {
  const auto s = summarize(InputSet{AlgorithmId::G, 5, true}, DigitCost::unit());
  EXPECT_EQ(s.count, 9u);
  const auto two = summarize(InputSet{AlgorithmId::G, 2, true}, DigitCost::unit());
  EXPECT_EQ(two.count, 1u);
  EXPECT_DOUBLE_EQ(two.mean(), 1.0);
  EXPECT_DOUBLE_EQ(two.variance(), 0.0);
  const auto one = summarize(InputSet{AlgorithmId::G, 1, true}, DigitCost::unit());
  EXPECT_EQ(one.count, 0u);
}

TEST(Summary, MomentsMatchDirectEnumeration) {
  for (AlgorithmId id : kAllAlgorithms) {
    for (bool reduced : {true, false}) {
      for (const DigitCost& c : {DigitCost::unit(), DigitCost::binary_length(), DigitCost::indicator(3)}) {
        const InputSet set{id, 120, reduced};
        const auto costs = direct_costs(set, c);
        const auto s = summarize(set, c);
        ASSERT_EQ(s.count, costs.size());
        for (int k = 1; k <= 4; ++k) {
          Rational sum = 0;
          for (const auto& x : costs) {
            Rational p = 1;
            for (int i = 0; i < k; ++i) p *= x;
            sum += p;
          }
          EXPECT_EQ(s.moments[static_cast<std::size_t>(k)], sum / static_cast<std::int64_t>(costs.size()))
              << name(id) << " " << c.descriptor() << " k=" << k;
        }
        // Jensen on the exact moments.
        EXPECT_GE(s.moments[2], s.moments[1] * s.moments[1]);
      }
    }
  }
}

TEST(Summary, GridMatchesSingleRuns) {
  const auto grid = summarize_grid(AlgorithmId::O, DigitCost::binary_length(), {50, 80, 200});
  ASSERT_EQ(grid.size(), 3u);
  for (const auto& g : grid) {
    const auto s = summarize(g.set, DigitCost::binary_length());
    EXPECT_EQ(g.count, s.count);
    EXPECT_EQ(g.histogram, s.histogram);
    EXPECT_EQ(g.moments, s.moments);
  }
}

TEST(Summary, PhiAndMomentGeneratingFunction) {
  const InputSet set{AlgorithmId::K, 150, true};
  const DigitCost c = DigitCost::binary_length();
  const auto s = summarize(set, c);
  EXPECT_NEAR(phi(s, 0.0).real(), static_cast<double>(s.count), 1e-9);
  double oracle = 0;
  for (const auto& x : direct_costs(set, c)) oracle += std::exp(std::log(2.0) * to_double(x));
  EXPECT_NEAR(phi(s, std::log(2.0)).real(), oracle, 1e-9 * oracle);
  EXPECT_NEAR(log_moment_generating(s, std::log(2.0)), std::log(oracle / static_cast<double>(s.count)), 1e-12);
}

TEST(Coefficients, PsiSmallValues) {
  const CoefficientTable t(AlgorithmId::G, DigitCost::unit(), 10);
  EXPECT_EQ(evaluate(t.psi(5), 1.0).real(), 9.0);
  EXPECT_EQ(evaluate(t.psi(6), 1.0).real(), 18.0);
  EXPECT_EQ(evaluate(t.phi(5), 1.0).real(), 9.0);
}

TEST(Coefficients, PsiIdentityExact) {
  for (AlgorithmId id : kAllAlgorithms) {
    const CoefficientTable t(id, DigitCost::binary_length(), 201);
    for (std::int64_t T = 1; T <= 200; ++T) EXPECT_EQ(t.psi(T), t.psi_from_phi(T)) << name(id) << " T=" << T;
  }
}

TEST(Coefficients, ComplexEvaluationMatchesSummary) {
  for (AlgorithmId id : kAllAlgorithms) {
    const DigitCost c = DigitCost::binary_length();
    const CoefficientTable t(id, c, 300);
    const auto s = summarize(InputSet{id, 300, true}, c);
    const std::complex<double> w(0.3, 0.7);
    const auto a = evaluate(t.phi(300), t.z_of(w));
    const auto b = phi(s, w);
    EXPECT_LE(std::abs(a - b), 1e-12 * std::abs(b)) << name(id);
  }
}

TEST(Coefficients, WindowSumIdentity) {
  // W * barPhi(N) = Psi(N + 1) - Psi(N - W).
  const CoefficientTable t(AlgorithmId::G, DigitCost::unit(), 60);
  for (std::int64_t W : {1, 5, 7}) {
    CountPolynomial diff = t.psi(51);
    const CountPolynomial lower = t.psi(50 - W);
    add_scaled(diff, lower, BigInt(-1));
    EXPECT_EQ(t.window_sum(50, W), trimmed(diff)) << "W=" << W;
  }
}

TEST(Smoothing, Window) {
  EXPECT_EQ(smoothing_window(100, 0.5), 10);
  EXPECT_EQ(smoothing_window(1000, 1.0), 1);
  EXPECT_THROW(smoothing_window(100, 0.0), ConfigError);
  EXPECT_THROW(smoothed(InputSet{AlgorithmId::G, 100, true}, DigitCost::unit(), 1.5), DegenerateError);
}

TEST(Smoothing, MixtureMatchesDirectAverage) {
  const InputSet set{AlgorithmId::G, 100, true};
  const auto sm = smoothed(set, DigitCost::unit(), 0.5);
  EXPECT_EQ(sm.window, 10);
  EXPECT_EQ(sm.Qs.size(), 11u);
  std::map<std::int64_t, Rational> oracle;
  for (std::int64_t Q = 90; Q <= 100; ++Q) {
    const auto costs = direct_costs(InputSet{set.algo, Q, true}, DigitCost::unit());
    for (const auto& x : costs) {
      oracle[static_cast<std::int64_t>(numerator_of(x))] +=
          Rational(1, 11) * Rational(1, static_cast<std::int64_t>(costs.size()));
    }
  }
  EXPECT_EQ(sm.mixture, oracle);
}

TEST(Smoothing, TotalVariation) {
  EXPECT_DOUBLE_EQ(total_variation({0.5, 0.5}, {0.5, 0.5}), 0.0);
  EXPECT_DOUBLE_EQ(total_variation({1, 0}, {0, 1}), 1.0);
  EXPECT_THROW(total_variation({1}, {0.5, 0.5}), ConfigError);

  // Pair-level oracle at a small N.
  const std::int64_t N = 60;
  const std::int64_t W = smoothing_window(N, 0.5);
  std::map<std::pair<std::int64_t, std::int64_t>, double> p, q;
  const double omegaN = static_cast<double>(input_count(InputSet{AlgorithmId::G, N, true}));
  for_each_input(InputSet{AlgorithmId::G, N, true}, [&](std::int64_t u, std::int64_t v) { p[{u, v}] = 1 / omegaN; });
  for (std::int64_t Q = N - W; Q <= N; ++Q) {
    const double n = static_cast<double>(input_count(InputSet{AlgorithmId::G, Q, true}));
    for_each_input(InputSet{AlgorithmId::G, Q, true},
                   [&](std::int64_t u, std::int64_t v) { q[{u, v}] += 1.0 / (static_cast<double>(W + 1) * n); });
  }
  double tv = 0;
  for (const auto& [k, pv] : p) tv += std::abs(pv - q[k]);
  EXPECT_NEAR(smoothing_distance(AlgorithmId::G, N, 0.5), tv / 2, 1e-14);

  EXPECT_LE(smoothing_distance(AlgorithmId::G, 1000, 0.5), 5.0 / std::sqrt(1000.0));
}

TEST(Gaussian, Diagnostics) {
  const InputSet set{AlgorithmId::G, 100, true};
  const auto point = make_summary(set, "unit", Rational(1), {0, 0, 7});
  EXPECT_THROW(gaussian_diagnostics(point, 1.0, 1.0), DegenerateError);
  EXPECT_THROW(gaussian_diagnostics(point, 1.0, 0.0), ConfigError);

  // Two equal atoms at mean -/+ one standard deviation.
  const double logN = std::log(100.0);
  const auto two = make_summary(set, "unit", Rational(1), {1, 0, 1});
  const auto d = gaussian_diagnostics(two, 1.0 / logN, 1.0 / std::sqrt(logN));
  EXPECT_NEAR(d.ks, normal_cdf(1.0) - 0.5, 1e-15);
  ASSERT_EQ(d.llt.size(), 2u);
  EXPECT_NEAR(d.llt[0].x, -1.0, 1e-14);
  EXPECT_NEAR(d.llt[1].x, 1.0, 1e-14);
}

TEST(Gaussian, KsToNormal) {
  EXPECT_NEAR(ks_to_normal({0.0}), 0.5, 1e-15);
  EXPECT_THROW(ks_to_normal({}), DegenerateError);
}

TEST(Regression, Synthetic) {
  const auto r = growth_regression({1, 2, 3, 4}, {3, 5, 7, 9});
  EXPECT_NEAR(r.slope, 2.0, 1e-14);
  EXPECT_NEAR(r.intercept, 1.0, 1e-14);
  EXPECT_NEAR(r.residual, 0.0, 1e-14);
  EXPECT_THROW(growth_regression({1, 2}, {1, 2}), ConfigError);
  EXPECT_THROW(growth_regression({1, 1, 1}, {1, 2, 3}), DegenerateError);
}

TEST(Density, OmegaGrowth) {
  const double N = 3e4;
  const auto g = summarize_grid(AlgorithmId::G, DigitCost::unit(), {30000}).front();
  const auto o = summarize_grid(AlgorithmId::O, DigitCost::unit(), {30000}).front();
  const auto k = summarize_grid(AlgorithmId::K, DigitCost::unit(), {30000}).front();
  const double pi2 = std::numbers::pi * std::numbers::pi;
  EXPECT_NEAR(static_cast<double>(g.count) / (N * N), 3 / pi2, 0.01 * 3 / pi2);
  EXPECT_NEAR(static_cast<double>(o.count) / (N * N), 3 / pi2, 0.01 * 3 / pi2);
  // u <= v/2 halves the count.
  EXPECT_NEAR(static_cast<double>(k.count) / (N * N), 3 / (2 * pi2), 0.01 * 3 / (2 * pi2));
}

TEST(Cache, RoundTrip) {
  const auto dir = fresh_dir("roundtrip");
  const SummaryCache cache(dir);
  const auto s = summarize(InputSet{AlgorithmId::K, 90, false}, DigitCost::binary_length());
  EXPECT_FALSE(cache.load(AlgorithmId::K, s.cost_id, 90, false));
  cache.store(s);
  const auto back = cache.load(AlgorithmId::K, s.cost_id, 90, false);
  ASSERT_TRUE(back);
  EXPECT_EQ(back->count, s.count);
  EXPECT_EQ(back->histogram, s.histogram);
  EXPECT_EQ(back->moments, s.moments);
  EXPECT_EQ(back->span, s.span);

  const auto grid = cached_grid(&cache, AlgorithmId::G, DigitCost::unit(), {40, 20});
  EXPECT_EQ(grid[0].set.N, 20);
  const auto again = cached_grid(&cache, AlgorithmId::G, DigitCost::unit(), {20, 40, 30});
  EXPECT_EQ(again[2].count, summarize(InputSet{AlgorithmId::G, 40, true}, DigitCost::unit()).count);
  std::filesystem::remove_all(dir);
}

TEST(Cache, CorruptionIsReported) {
  const auto dir = fresh_dir("corrupt");
  const SummaryCache cache(dir);
  const auto s = summarize(InputSet{AlgorithmId::G, 30, true}, DigitCost::unit());
  cache.store(s);
  const auto path = cache.path_for(AlgorithmId::G, s.cost_id, 30, true);
  {
    std::ofstream out(path, std::ios::trunc);
    out << "{ not json";
  }
  EXPECT_THROW(cache.load(AlgorithmId::G, s.cost_id, 30, true), CacheError);
  {
    auto j = to_json(s);
    j["count"] = 1;
    std::ofstream out(path, std::ios::trunc);
    out << j.dump();
  }
  EXPECT_THROW(cache.load(AlgorithmId::G, s.cost_id, 30, true), CacheError);
  {
    auto j = to_json(s);
    j["schema_version"] = kSchemaVersion + 1;
    std::ofstream out(path, std::ios::trunc);
    out << j.dump();
  }
  EXPECT_FALSE(cache.load(AlgorithmId::G, s.cost_id, 30, true));
  std::filesystem::remove_all(dir);
}
