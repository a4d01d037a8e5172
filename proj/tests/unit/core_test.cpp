#include "euclid/division.hpp"
#include "euclid/lft.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace euclid;

namespace {

std::vector<Digit> D(std::initializer_list<std::pair<int, int>> xs) {
  std::vector<Digit> out;
  for (auto [m, e] : xs) out.push_back(Digit{m, e});
  return out;
}

// Long division by hand, independent of divide().
std::pair<std::int64_t, std::int64_t> long_division(std::int64_t u, std::int64_t v) {
  std::int64_t m = 0, r = v;
  while (r >= u) {
    r -= u;
    ++m;
  }
  return {m, r};
}

Lft<BigInt> random_branch(AlgorithmId id, std::mt19937_64& rng, int depth, int m_max) {
  const Algorithm algo = Algorithm::of(id);
  Lft<BigInt> h = Lft<BigInt>::identity();
  std::uniform_int_distribution<int> md(1, m_max), ed(0, 1);
  for (int i = 0; i < depth;) {
    Digit q{md(rng), ed(rng) ? +1 : -1};
    if (!algo.generic(q)) continue;
    h = compose(h, digit_to_lft<BigInt>(algo, q));
    ++i;
  }
  return h;
}

}  // namespace

TEST(Divide, SpecExamples) {
  auto s = divide<std::int64_t>(AlgorithmId::G, 5, 13);
  EXPECT_EQ(s.digit, (Digit{2, +1}));
  EXPECT_EQ(s.remainder, 3);
  s = divide<std::int64_t>(AlgorithmId::K, 4, 11);
  EXPECT_EQ(s.digit, (Digit{3, -1}));
  EXPECT_EQ(s.remainder, 1);
  s = divide<std::int64_t>(AlgorithmId::O, 2, 5);
  EXPECT_EQ(s.digit, (Digit{3, -1}));
  EXPECT_EQ(s.remainder, 1);
  s = divide<std::int64_t>(AlgorithmId::O, 1, 1);
  EXPECT_EQ(s.digit, (Digit{1, +1}));
  EXPECT_EQ(s.remainder, 0);
}

TEST(Divide, DomainErrors) {
  EXPECT_THROW(divide<std::int64_t>(AlgorithmId::G, 0, 5), DomainError);
  EXPECT_THROW(divide<std::int64_t>(AlgorithmId::G, 5, 0), DomainError);
  EXPECT_THROW(divide<std::int64_t>(AlgorithmId::G, 5, 5), DomainError);
  EXPECT_THROW(divide<std::int64_t>(AlgorithmId::K, 3, 5), DomainError);
  EXPECT_THROW(divide<std::int64_t>(AlgorithmId::O, 6, 5), DomainError);
  EXPECT_NO_THROW(divide<std::int64_t>(AlgorithmId::K, 2, 4));
}

TEST(Divide, CenteredTieKeepsHalfOpenInterval) {
  // v = 5, u = 2: s in [-1, 1); 5 = 2*2 + 1 is excluded, 5 = 3*2 - 1 chosen.
  auto s = divide<std::int64_t>(AlgorithmId::K, 2, 5);
  EXPECT_EQ(s.digit, (Digit{3, -1}));
  EXPECT_EQ(s.remainder, 1);
}

TEST(Divide, MatchesLongDivisionForG) {
  for (std::int64_t v = 2; v <= 200; ++v) {
    for (std::int64_t u = 1; u < v; ++u) {
      auto [m, r] = long_division(u, v);
      auto s = divide<std::int64_t>(AlgorithmId::G, u, v);
      ASSERT_EQ(s.digit.m, m);
      ASSERT_EQ(s.remainder, r);
    }
  }
}

TEST(Divide, RemainderRangesExhaustive) {
  for (AlgorithmId id : kAllAlgorithms) {
    const Algorithm algo = Algorithm::of(id);
    for (std::int64_t v = 1; v <= 500; ++v) {
      for (std::int64_t u = 1; u <= v; ++u) {
        if (!in_domain(id, u, v)) continue;
        auto s = divide<std::int64_t>(id, u, v);
        ASSERT_EQ(v, s.digit.m * u + s.digit.eps * s.remainder);
        ASSERT_TRUE(algo.generic(s.digit));
        ASSERT_GE(s.remainder, 0);
        switch (id) {
          case AlgorithmId::G: ASSERT_LT(s.remainder, u); break;
          case AlgorithmId::K: ASSERT_LE(2 * s.remainder, u); break;
          case AlgorithmId::O: ASSERT_LE(s.remainder, u); break;
        }
        if (s.remainder > 0) {
          ASSERT_TRUE(in_domain(id, s.remainder, u));
        }
      }
    }
  }
}

TEST(Decompose, SpecExamples) {
  EXPECT_EQ(decompose<std::int64_t>(AlgorithmId::G, 5, 13).digits, D({{2, 1}, {1, 1}, {1, 1}, {2, 1}}));
  EXPECT_EQ(decompose<std::int64_t>(AlgorithmId::O, 5, 7).digits, D({{1, 1}, {3, -1}, {3, -1}, {1, 1}}));
  EXPECT_EQ(decompose<std::int64_t>(AlgorithmId::G, 10, 26).digits,
            decompose<std::int64_t>(AlgorithmId::G, 5, 13).digits);
  EXPECT_EQ(decompose<std::int64_t>(AlgorithmId::G, 5, 13).depth(), 4u);
}

TEST(Decompose, BigIntegerMatchesMachineIntegers) {
  const BigInt u("123456789012345678901234567890"), v("987654321098765432109876543211");
  const Trajectory t = decompose<BigInt>(AlgorithmId::G, u, v);
  const auto [ru, rv] = reconstruct<BigInt>(t);
  const BigInt g = boost::multiprecision::gcd(u, v);
  EXPECT_EQ(ru, u / g);
  EXPECT_EQ(rv, v / g);
  EXPECT_EQ(decompose<BigInt>(AlgorithmId::G, 5, 13).digits,
            decompose<std::int64_t>(AlgorithmId::G, 5, 13).digits);
}

TEST(Decompose, RoundTripDeterminantDenominatorDepthExhaustive) {
  for (AlgorithmId id : kAllAlgorithms) {
    const double k0 = Algorithm::of(id).depth_constant();
    for (std::int64_t v = 1; v <= 500; ++v) {
      for (std::int64_t u = 1; u <= v; ++u) {
        if (std::gcd(u, v) != 1 || !in_domain(id, u, v)) continue;
        const Trajectory t = decompose<std::int64_t>(id, u, v);
        ASSERT_TRUE(well_formed(t));
        const Lft<std::int64_t> h = trajectory_lft<std::int64_t>(t);
        ASSERT_EQ(std::abs(h.det()), 1);
        ASSERT_EQ(lft_denom(h, Rational(0)), Rational(v));
        const auto [ru, rv] = reconstruct<std::int64_t>(t);
        ASSERT_EQ(ru, u);
        ASSERT_EQ(rv, v);
        ASSERT_LE(static_cast<double>(t.depth()), k0 * std::log(static_cast<double>(v)) + 1.0);
      }
    }
  }
}

TEST(Lft, DigitBranches) {
  const Algorithm g = Algorithm::of(AlgorithmId::G), k = Algorithm::of(AlgorithmId::K);
  EXPECT_EQ(digit_to_lft<BigInt>(g, {2, +1}), (Lft<BigInt>{0, 1, 1, 2}));
  EXPECT_EQ(digit_to_lft<BigInt>(k, {3, -1}), (Lft<BigInt>{0, 1, -1, 3}));
  EXPECT_EQ(digit_to_lft<BigInt>(k, {3, -1}).det(), 1);
  EXPECT_THROW(digit_to_lft<BigInt>(g, {1, -1}), InvalidDigitError);
  EXPECT_THROW(digit_to_lft<BigInt>(k, {2, -1}), InvalidDigitError);
  EXPECT_THROW(digit_to_lft<BigInt>(Algorithm::of(AlgorithmId::O), {2, 1}), InvalidDigitError);
}

TEST(Lft, ComposeAndEvaluate) {
  const Algorithm g = Algorithm::of(AlgorithmId::G);
  const auto h = compose(digit_to_lft<BigInt>(g, {1, 1}), digit_to_lft<BigInt>(g, {2, 1}));
  EXPECT_EQ(h, (Lft<BigInt>{1, 2, 1, 3}));
  EXPECT_EQ(compose(h, Lft<BigInt>::identity()), h);
  EXPECT_EQ(lft_eval(h, Rational(0)), Rational(2, 3));
  EXPECT_EQ(lft_denom(h, Rational(0)), Rational(3));
  EXPECT_EQ(lft_deriv_abs(h, Rational(0)), Rational(1, 9));
  EXPECT_EQ(lft_eval(Lft<BigInt>{0, 1, 1, 2}, Rational(3, 5)), Rational(5, 13));
  EXPECT_EQ(lft_eval(Lft<BigInt>::identity(), Rational(7, 11)), Rational(7, 11));
  EXPECT_EQ(lft_deriv_abs(Lft<BigInt>::identity(), Rational(7, 11)), Rational(1));
  EXPECT_THROW(lft_eval(Lft<BigInt>{0, 1, 1, 2}, Rational(-2)), PoleError);
  EXPECT_DOUBLE_EQ(lft_eval(h, 0.5), 2.5 / 3.5);
}

TEST(Lft, AssociativityAndDenominatorIdentity) {
  std::mt19937_64 rng(7);
  for (AlgorithmId id : kAllAlgorithms) {
    for (int trial = 0; trial < 200; ++trial) {
      const auto a = random_branch(id, rng, 1 + trial % 3, 9);
      const auto b = random_branch(id, rng, 1 + trial % 2, 9);
      const auto c = random_branch(id, rng, 1 + trial % 4, 9);
      ASSERT_EQ(compose(compose(a, b), c), compose(a, compose(b, c)));
      const Rational x(trial % 7, 14);
      const Rational den = lft_denom(a, x);
      ASSERT_EQ(den * den * lft_deriv_abs(a, x), Rational(1));
    }
  }
}

TEST(Lft, Mirror) {
  const Algorithm g = Algorithm::of(AlgorithmId::G);
  const Lft<BigInt> h{1, 2, 1, 3};
  EXPECT_EQ(mirror(h), (Lft<BigInt>{1, 1, 2, 3}));
  EXPECT_EQ(mirror(Lft<BigInt>::identity()), Lft<BigInt>::identity());
  const auto h1 = digit_to_lft<BigInt>(g, {1, 1}), h2 = digit_to_lft<BigInt>(g, {2, 1});
  EXPECT_EQ(lft_eval(mirror(compose(h1, h2)), Rational(0)), Rational(1, 3));
  EXPECT_EQ(lft_eval(compose(h2, h1), Rational(0)), Rational(1, 3));

  std::mt19937_64 rng(11);
  for (AlgorithmId id : kAllAlgorithms) {
    for (int trial = 0; trial < 100; ++trial) {
      const auto a = random_branch(id, rng, 3, 7), b = random_branch(id, rng, 2, 7);
      ASSERT_EQ(mirror(mirror(a)), a);
      ASSERT_EQ(mirror(compose(a, b)), compose(mirror(b), mirror(a)));
      ASSERT_EQ(lft_deriv_abs(mirror(a), Rational(0)), lft_deriv_abs(a, Rational(0)));
    }
  }
}

TEST(Lft, Delta) {
  const Algorithm g = Algorithm::of(AlgorithmId::G);
  const auto h1 = digit_to_lft<BigInt>(g, {1, 1}), h2 = digit_to_lft<BigInt>(g, {2, 1});
  const RationalInterval unit{0, 1};
  EXPECT_EQ(lft_delta(h1, h2, unit), Rational(1, 6));
  EXPECT_EQ(lft_delta(h1, h1, unit), Rational(0));

  // Grid oracle: the exact infimum never exceeds any sampled value and is close to the minimum.
  std::mt19937_64 rng(5);
  for (AlgorithmId id : kAllAlgorithms) {
    const Algorithm algo = Algorithm::of(id);
    const RationalInterval iv{0, algo.upper()};
    for (int trial = 0; trial < 60; ++trial) {
      const auto a = random_branch(id, rng, 2, 6), b = random_branch(id, rng, 2, 6);
      const Rational d = lft_delta(a, b, iv);
      ASSERT_EQ(d, lft_delta(b, a, iv));
      if (d == 0) continue;
      double grid_min = 1e300;
      for (int i = 0; i <= 2000; ++i) {
        const double x = algo.upper_double() * i / 2000.0;
        const double q = (to_double(a.c) * x + to_double(a.d)) * (to_double(b.c) * x + to_double(b.d));
        const double num = std::abs(to_double(BigInt(a.c * b.d - b.c * a.d)));
        grid_min = std::min(grid_min, num / std::abs(q));
      }
      ASSERT_LE(to_double(d), grid_min * (1 + 1e-12));
      ASSERT_GE(to_double(d), grid_min * (1 - 1e-3));
    }
  }
}

TEST(Lft, ContractionAndDistortion) {
  for (AlgorithmId id : kAllAlgorithms) {
    const Algorithm algo = Algorithm::of(id);
    const double rho_hat = algo.contraction_ratio() * 1.05;
    std::mt19937_64 rng(3);
    double worst_c = 0.0, worst_k = 0.0;
    for (int trial = 0; trial < 300; ++trial) {
      const int n = 1 + trial % 8;
      const auto h = random_branch(id, rng, n, 10);
      for (int i = 0; i < 100; ++i) {
        const double x = algo.upper_double() * i / 99.0;
        worst_c = std::max(worst_c, lft_deriv_abs(h, x) / std::pow(rho_hat, n));
        worst_k = std::max(worst_k, lft_distortion(h, x));
      }
    }
    EXPECT_LT(worst_c, 10.0) << name(id);
    EXPECT_TRUE(std::isfinite(worst_k)) << name(id);
    EXPECT_LT(worst_k, 10.0) << name(id);
  }
}

TEST(Reconstruct, Examples) {
  Trajectory t{AlgorithmId::G, D({{2, 1}, {1, 1}, {1, 1}, {2, 1}})};
  EXPECT_EQ(reconstruct(t), (std::pair<BigInt, BigInt>{5, 13}));
  Trajectory k{AlgorithmId::K, D({{3, -1}, {4, 1}})};
  EXPECT_EQ(reconstruct(k), (std::pair<BigInt, BigInt>{4, 11}));
  Trajectory empty{AlgorithmId::G, {}};
  EXPECT_EQ(reconstruct(empty), (std::pair<BigInt, BigInt>{0, 1}));
}

TEST(MapStep, Examples) {
  EXPECT_EQ(map_step(AlgorithmId::G, Rational(5, 13)), Rational(3, 5));
  EXPECT_EQ(map_step(AlgorithmId::G, Rational(0)), Rational(0));
  EXPECT_EQ(map_step(AlgorithmId::O, Rational(1)), Rational(0));
  EXPECT_EQ(map_step(AlgorithmId::K, Rational(4, 11)), Rational(1, 4));
}

TEST(Algorithm, ParseAndConditions) {
  EXPECT_EQ(parse_algorithm("K"), AlgorithmId::K);
  EXPECT_THROW(parse_algorithm("X"), ConfigError);
  const Algorithm g = Algorithm::of(AlgorithmId::G);
  EXPECT_FALSE(g.admissible_final({1, 1}));
  EXPECT_TRUE(g.admissible_final({2, 1}));
  const Algorithm o = Algorithm::of(AlgorithmId::O);
  EXPECT_TRUE(o.admissible_final({1, 1}));
  EXPECT_FALSE(o.admissible_final({3, -1}));
  EXPECT_TRUE(o.generic({3, -1}));
}

TEST(Algorithm, DensityNormalisation) {
  const double lphi = std::log(std::numbers::phi);
  EXPECT_NEAR(Algorithm::of(AlgorithmId::O).density_mass(), 3 * lphi, 1e-14);
  for (AlgorithmId id : kAllAlgorithms) {
    const Algorithm algo = Algorithm::of(id);
    EXPECT_NEAR(algo.density_integral(0.0, algo.upper_double()), 1.0, 1e-14);
    // Midpoint-rule oracle for the closed-form antiderivative.
    double s = 0;
    const int n = 20000;
    const double h = algo.upper_double() / n;
    for (int i = 0; i < n; ++i) s += algo.density((i + 0.5) * h) * h;
    EXPECT_NEAR(s, 1.0, 1e-8);
  }
}
