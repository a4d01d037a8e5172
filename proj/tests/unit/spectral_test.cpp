#include "euclid/spectral.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace euclid;

namespace {

const double kPhi = std::numbers::phi;

// Brute-force sum_{m>=1} m^-t with an integral remainder, independent of the zeta code.
double zeta_direct(double t) {
  double s = 0;
  const int M = 200000;
  for (int m = M; m >= 1; --m) s += std::pow(m, -t);
  return s + std::pow(M + 0.5, 1 - t) / (t - 1);
}

}  // namespace

TEST(Chebyshev, InterpolationAndQuadrature) {
  const ChebyshevGrid g(30, 0.0, 0.5);
  std::vector<double> v;
  for (double x : g.nodes()) v.push_back(1.0 / (kPhi + x));
  for (double y : {0.0, 0.1, 0.33, 0.5}) EXPECT_NEAR(g.interpolate(v, y), 1.0 / (kPhi + y), 1e-14);
  EXPECT_NEAR(g.integrate(v), std::log((kPhi + 0.5) / kPhi), 1e-15);
  const FunctionModel f(g, v);
  EXPECT_NEAR(f.derivative(0.2), -1.0 / ((kPhi + 0.2) * (kPhi + 0.2)), 1e-12);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(f(g.nodes()[i]), v[i], 1e-13);
}

TEST(Spectral, HurwitzZeta) {
  EXPECT_NEAR(hurwitz_zeta(4.0, 1.0), std::pow(std::numbers::pi, 4) / 90, 1e-15);
  EXPECT_NEAR(hurwitz_zeta(2.5, 1.0), zeta_direct(2.5), 1e-12);
}

TEST(Spectral, ConfigValidation) {
  OperatorConfig cfg;
  cfg.degree = 4;
  EXPECT_THROW(TransferOperator(AlgorithmId::G, DigitCost::unit(), cfg), ConfigError);
}

TEST(Spectral, GaussDensityIsFixed) {
  const TransferOperator op(AlgorithmId::G, DigitCost::unit());
  const Eigen::MatrixXd A = op.assemble(1.0, 0.0);
  Eigen::VectorXd f(static_cast<Eigen::Index>(op.grid().size()));
  for (std::size_t i = 0; i < op.grid().size(); ++i) f(static_cast<Eigen::Index>(i)) = 1.0 / (std::numbers::ln2 * (1 + op.grid().nodes()[i]));
  EXPECT_LE((A * f - f).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Spectral, ConstantFunctionAtSigmaTwo) {
  const TransferOperator op(AlgorithmId::G, DigitCost::unit());
  const Eigen::MatrixXd A = op.assemble(2.0, 0.0);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(op.grid().size()));
  const Eigen::VectorXd g = A * one;
  // Node 0 is x = upper end, the last node is x = 0.
  EXPECT_NEAR(g(g.size() - 1), zeta_direct(4.0), 1e-12);
  EXPECT_NEAR(g(0), zeta_direct(4.0) - 1.0, 1e-12);  // sum (m+1)^-4
}

TEST(Spectral, MonotoneInW) {
  const TransferOperator op(AlgorithmId::K, DigitCost::binary_length());
  const Eigen::MatrixXd a = op.assemble(1.0, 0.1), b = op.assemble(1.0, 0.2);
  const Eigen::VectorXd pos = Eigen::VectorXd::Ones(a.rows());
  EXPECT_TRUE(((b * pos - a * pos).array() > 0).all());
}

TEST(Spectral, DivergenceError) {
  const TransferOperator op(AlgorithmId::G, DigitCost::binary_length());
  EXPECT_THROW(op.assemble(0.5, 0.0), NumericalError);
  EXPECT_THROW(op.assemble(0.8, 0.5), NumericalError);
}

TEST(Spectral, RankOneEigen) {
  Eigen::VectorXd u(3), v(3);
  u << 1, 2, 3;
  v << 0.5, 0.25, 0.0;
  const Eigen::MatrixXd A = (u * v.transpose()) * (2.0 / v.dot(u));
  EXPECT_NEAR(dominant_eigen(A).lambda, 2.0, 1e-15);
}

TEST(Spectral, LambdaAtOneAndDensities) {
  for (AlgorithmId id : kAllAlgorithms) {
    const SpectralSolver solver(id, DigitCost::unit());
    const EigenResult r = solver.eigen(1.0, 0.0);
    EXPECT_NEAR(r.lambda, 1.0, 1e-12) << name(id);
    EXPECT_LE(r.residual, 1e-10);
    EXPECT_GT(r.gap_estimate, 0.0);
    EXPECT_LT(r.gap_estimate, 1.0);
    const FunctionModel f = solver.invariant_density();
    const Algorithm algo = Algorithm::of(id);
    EXPECT_NEAR(f.integral(), 1.0, 1e-12);
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
      const double x = algo.upper_double() * i / 99.0;
      worst = std::max(worst, std::abs(f(x) - algo.density(x)));
    }
    EXPECT_LE(worst, id == AlgorithmId::G ? 1e-10 : 1e-8) << name(id);
  }
}

TEST(Spectral, LambdaMonotonicity) {
  const SpectralSolver solver(AlgorithmId::G, DigitCost::indicator(1));
  double prev = 1e9;
  for (double s = 0.8; s <= 1.2001; s += 0.1) {
    const double l = solver.lambda(s, 0.0);
    EXPECT_LT(l, prev);
    prev = l;
  }
  EXPECT_LT(solver.lambda(1.0, -0.1), solver.lambda(1.0, 0.0));
  EXPECT_LT(solver.lambda(1.0, 0.0), solver.lambda(1.0, 0.1));
}

TEST(Spectral, GaussConstants) {
  const SpectralSolver solver(AlgorithmId::G, DigitCost::unit());
  const ConstantsBundle b = solver.constants();
  EXPECT_NEAR(b.dL_ds, -std::numbers::pi * std::numbers::pi / (6 * std::numbers::ln2), 1e-6);
  EXPECT_NEAR(b.mu, 12 * std::numbers::ln2 / (std::numbers::pi * std::numbers::pi), 1e-7);
  EXPECT_NEAR(b.chi, 0.0, 1e-8);
  EXPECT_NEAR(b.delta_hat2, 0.0, 1e-8);
  EXPECT_NEAR(b.dL_dw, 1.0, 1e-9);
  EXPECT_NEAR(b.delta2_c, 2 * b.d2L_ds2 / std::pow(std::abs(b.dL_ds), 3), 1e-7);
  EXPECT_TRUE(b.muc_check);
  EXPECT_TRUE(b.decomposition_check);
  EXPECT_NO_THROW(cross_validate(b));
}

TEST(Spectral, CostVanishingOnAllDigits) {
  const SpectralSolver k(AlgorithmId::K, DigitCost::indicator(1));
  EXPECT_NEAR(k.dL_dw(), 0.0, 1e-14);
  EXPECT_THROW(k.constants(), ConfigError);
  EXPECT_THROW(SpectralSolver(AlgorithmId::O, DigitCost::indicator(2)).constants(), ConfigError);
}

TEST(Spectral, DigitFrequencyDualOracle) {
  for (AlgorithmId id : kAllAlgorithms) {
    const std::int64_t m1 = id == AlgorithmId::K ? 2 : 1;
    const std::int64_t m2 = id == AlgorithmId::G ? 2 : 3;
    for (const DigitCost& c : {DigitCost::indicator(m1), DigitCost::indicator(m2), DigitCost::binary_length()}) {
      const SpectralSolver solver(id, c);
      const ConstantsBundle b = solver.constants();
      const MuHat closed = mu_hat_closed_form(id, c);
      EXPECT_NEAR(b.dL_dw, closed.value, 1e-7) << name(id) << " " << c.descriptor();
      EXPECT_NEAR(b.dL_dw_analytic, closed.value, 1e-9) << name(id) << " " << c.descriptor();
      EXPECT_TRUE(b.decomposition_check) << name(id) << " " << c.descriptor();
    }
  }
}

TEST(Spectral, SigmaSolve) {
  const SpectralSolver solver(AlgorithmId::G, DigitCost::unit());
  EXPECT_NEAR(solver.solve_sigma(0.0), 1.0, 1e-9);
  const ConstantsBundle b = solver.constants();
  const double nu = 1e-3;
  const double slope = (solver.solve_sigma(nu) - solver.solve_sigma(-nu)) / (2 * nu);
  EXPECT_NEAR(slope, b.mu_c / 2, 1e-5);
}

TEST(Spectral, DegreeRobustness) {
  OperatorConfig hi;
  hi.degree = 56;
  hi.m_cap = 128;
  for (AlgorithmId id : kAllAlgorithms) {
    const DigitCost c = DigitCost::indicator(id == AlgorithmId::K ? 2 : 1);
    const auto a = SpectralSolver(id, c).constants();
    const auto b = SpectralSolver(id, c, hi).constants();
    EXPECT_NEAR(a.lambda_10, b.lambda_10, 1e-8) << name(id);
    EXPECT_NEAR(a.dL_ds, b.dL_ds, 1e-8) << name(id);
    EXPECT_NEAR(a.dL_dw, b.dL_dw, 1e-8) << name(id);
    EXPECT_NEAR(a.d2L_ds2, b.d2L_ds2, 1e-8) << name(id);
    EXPECT_NEAR(a.d2L_dw2, b.d2L_dw2, 1e-8) << name(id);
    EXPECT_NEAR(a.d2L_dsdw, b.d2L_dsdw, 1e-8) << name(id);
  }
}
