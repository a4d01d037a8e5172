#pragma once

#include "euclid/algorithm.hpp"
#include "euclid/chebyshev.hpp"
#include "euclid/cost.hpp"
#include "euclid/errors.hpp"
#include "euclid/realdyn.hpp"

#include <Eigen/Dense>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_zeta.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace euclid {

struct OperatorConfig {
  int degree = 40;
  std::int64_t m_cap = 64;
  int tail_degree = 10;      // polynomial degree used for f on the tail image near 0
  double tail_tol = 1e-14;
  int max_iterations = 20000;
  double eigen_tol = 1e-15;  // relative change of lambda between power steps

  void validate() const {
    if (degree < 8) throw ConfigError("operator degree must be >= 8 (got " + std::to_string(degree) + ")");
    if (m_cap < 4) throw ConfigError("operator m_cap must be >= 4");
    if (tail_degree < 2 || tail_degree > 20) throw ConfigError("tail_degree must be in 2..20");
  }
};

/// Hurwitz zeta sum_{k >= 0} (k + a)^{-t} for t > 1, a > 0.
inline double hurwitz_zeta(double t, double a) {
  gsl_set_error_handler_off();
  gsl_sf_result r;
  const int status = gsl_sf_hzeta_e(t, a, &r);
  if (status != GSL_SUCCESS) {
    throw NumericalError("Hurwitz zeta failed at t=" + std::to_string(t) + ", a=" + std::to_string(a) + ": " +
                         gsl_strerror(status));
  }
  return r.val;
}

namespace detail {

/// Digits m in [from, to] (to < 0 meaning unbounded) sharing one cost value.
struct TailBlock {
  std::int64_t from, to;
  double cost;
};

}  // namespace detail

/// Which weight a branch carries: exp(w c) for H_{s,w}, or c exp(w c) for its
/// w-derivative.
enum class BranchWeight { Exp, CostTimesExp };

/// Discretised transfer operator H_{s,w} of one algorithm and cost on
/// Chebyshev-Lobatto nodes of I, with the branches m > m_cap summed through
/// Hurwitz zeta values.
class TransferOperator {
 public:
  TransferOperator(AlgorithmId id, DigitCost cost, OperatorConfig cfg = {})
      : id_(id), algo_(Algorithm::of(id)), cost_(std::move(cost)), cfg_(cfg),
        grid_(cfg.degree, 0.0, Algorithm::of(id).upper_double()) {
    cfg_.validate();
    explicit_max_ = cfg_.m_cap;
    if (cost_.kind() == DigitCost::Kind::Indicator) explicit_max_ = std::max(explicit_max_, cost_.indicator_digit());
    if (cost_.kind() == DigitCost::Kind::Table) explicit_max_ = std::max(explicit_max_, cost_.table_max_m());
    build_tail_projection();
    build_blocks();
  }

  AlgorithmId algo() const { return id_; }
  const DigitCost& cost() const { return cost_; }

  bool charges_some_digit() const {
    if (cost_.kind() == DigitCost::Kind::Unit || cost_.kind() == DigitCost::Kind::BinaryLength) return true;
    for (const Digit& q : detail::digits_up_to(id_, explicit_max_)) {
      try {
        if (cost_.value(q) > 0) return true;
      } catch (const MissingTableEntryError&) {
      }
    }
    return false;
  }
  const OperatorConfig& config() const { return cfg_; }
  const ChebyshevGrid& grid() const { return grid_; }
  std::int64_t explicit_max() const { return explicit_max_; }

  /// Rigorous-style bound on the branches left out for table costs (values
  /// beyond the table are taken as 0); zero for the other kinds.
  double omitted_bound(double s, double w) const {
    if (cost_.kind() != DigitCost::Kind::Table) return 0.0;
    const GrowthEnvelope env = growth_envelope(cost_, id_, std::max<std::int64_t>(explicit_max_, 2));
    const double M = static_cast<double>(explicit_max_);
    // sum over m > M and both signs of exp(|w| (A + B log m)) m^{-2s}, by an integral.
    const double t = 2 * s - std::abs(w) * env.B;
    if (t <= 1) return std::numeric_limits<double>::infinity();
    return 2.0 * std::exp(std::abs(w) * env.A) * std::pow(M, 1 - t) / (t - 1);
  }

  /// Operator matrix acting on nodal values.
  Eigen::MatrixXd assemble(double s, double w, BranchWeight mode = BranchWeight::Exp) const {
    check_convergence(s, w);
    const std::size_t n = grid_.size();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const double x = grid_.nodes()[i];
      auto row = A.row(static_cast<Eigen::Index>(i));
      for (std::int64_t m = 1; m <= explicit_max_; ++m) {
        for (int eps : {+1, -1}) {
          const Digit q{m, eps};
          if (!algo_.generic(q)) continue;
          const double c = digit_cost(q);
          const double g = weight(c, w, mode) * std::pow(static_cast<double>(m) + eps * x, -2 * s);
          if (g == 0) continue;
          const auto r = grid_.interpolation_row(1.0 / (static_cast<double>(m) + eps * x));
          for (std::size_t k = 0; k < n; ++k) row(static_cast<Eigen::Index>(k)) += g * r[k];
        }
      }
      // Tail: f on [0, y_tail] in scaled monomials (y / y_tail)^r.
      for (const auto& block : blocks_) {
        const double g = weight(block.cost, w, mode);
        if (g == 0) continue;
        for (int r = 0; r <= cfg_.tail_degree; ++r) {
          const double sr = block_sum(block, 2 * s + r, x) / std::pow(y_tail_, r);
          for (std::size_t k = 0; k < n; ++k) row(static_cast<Eigen::Index>(k)) += g * sr * tail_proj_(r, static_cast<Eigen::Index>(k));
        }
      }
    }
    return A;
  }

 private:
  static double weight(double c, double w, BranchWeight mode) {
    const double e = w == 0 ? 1.0 : std::exp(w * c);
    return mode == BranchWeight::Exp ? e : c * e;
  }

  double digit_cost(const Digit& q) const {
    try {
      return cost_.value(q);
    } catch (const MissingTableEntryError&) {
      return 0.0;
    }
  }

  void check_convergence(double s, double w) const {
    double growth = 0;  // exponent b with exp(w c(m)) <= C m^b
    if (cost_.kind() == DigitCost::Kind::BinaryLength) growth = std::max(w, 0.0) * to_double(cost_.scale()) / std::log(2.0);
    if (!(2 * s - growth > 1)) {
      throw NumericalError("transfer operator diverges at (s, w) = (" + std::to_string(s) + ", " +
                           std::to_string(w) + ")");
    }
  }

  void build_tail_projection() {
    // Tail images y = 1/(m + eps x) with m > explicit_max lie in [0, y_tail].
    y_tail_ = 1.0 / (static_cast<double>(explicit_max_ + 1) - algo_.upper_double());
    const int p = cfg_.tail_degree;
    const ChebyshevGrid tail_grid(p, 0.0, y_tail_);
    Eigen::MatrixXd V(p + 1, p + 1);
    Eigen::MatrixXd R(p + 1, static_cast<Eigen::Index>(grid_.size()));
    for (int j = 0; j <= p; ++j) {
      const double z = tail_grid.nodes()[static_cast<std::size_t>(j)];
      for (int r = 0; r <= p; ++r) V(j, r) = std::pow(z / y_tail_, r);
      const auto row = grid_.interpolation_row(z);
      for (std::size_t k = 0; k < row.size(); ++k) R(j, static_cast<Eigen::Index>(k)) = row[k];
    }
    tail_proj_ = V.fullPivLu().solve(R);
  }

  void build_blocks() {
    const std::int64_t start = explicit_max_ + 1;
    const double scale = to_double(cost_.scale());
    switch (cost_.kind()) {
      case DigitCost::Kind::Unit: blocks_.push_back({start, -1, scale}); break;
      case DigitCost::Kind::Indicator:
      case DigitCost::Kind::Table: blocks_.push_back({start, -1, 0.0}); break;
      case DigitCost::Kind::BinaryLength: {
        std::int64_t from = start;
        while (from < (std::int64_t{1} << 60)) {
          const int k = static_cast<int>(DigitCost::binary_length_of(from)) - 1;
          const std::int64_t to = (std::int64_t{2} << k) - 1;
          blocks_.push_back({from, to, scale * (k + 1)});
          from = to + 1;
        }
        blocks_.push_back({from, -1, scale * 61});
        break;
      }
    }
  }

  /// sum over valid digits (m, eps) of the block of (m + eps x)^{-t}.
  double block_sum(const detail::TailBlock& b, double t, double x) const {
    auto upto = [&](double shift, std::int64_t from, std::int64_t to) {
      // sum_{m = from}^{to} (m + shift)^{-t}
      const double head = hurwitz_zeta(t, static_cast<double>(from) + shift);
      return to < 0 ? head : head - hurwitz_zeta(t, static_cast<double>(to + 1) + shift);
    };
    switch (id_) {
      case AlgorithmId::G: return upto(x, b.from, b.to);
      case AlgorithmId::K: return upto(x, b.from, b.to) + upto(-x, b.from, b.to);
      case AlgorithmId::O: {
        // odd m = 2k + 1 in [from, to]
        const std::int64_t k_first = b.from / 2;
        const std::int64_t k_last = b.to < 0 ? -1 : (b.to - 1) / 2;
        const double f = std::pow(2.0, -t);
        return f * (upto((1 + x) / 2, k_first, k_last) + upto((1 - x) / 2, k_first, k_last));
      }
    }
    return 0.0;
  }

  AlgorithmId id_;
  Algorithm algo_;
  DigitCost cost_;
  OperatorConfig cfg_;
  ChebyshevGrid grid_;
  std::int64_t explicit_max_ = 0;
  double y_tail_ = 0;
  Eigen::MatrixXd tail_proj_;
  std::vector<detail::TailBlock> blocks_;
};

struct EigenResult {
  double lambda = 0;
  std::vector<double> vector;  // positive, max-normalised
  double residual = 0;         // sup |A f - lambda f| / sup |f|
  double gap_estimate = 0;     // observed |lambda_2 / lambda_1| from the convergence rate
  int iterations = 0;
};

/// Power iteration from the constant vector.
inline EigenResult dominant_eigen(const Eigen::MatrixXd& A, const OperatorConfig& cfg = {}) {
  const Eigen::Index n = A.rows();
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
  EigenResult out;
  double lambda = 0, prev_delta = 0;
  double ratio_sum = 0;
  int ratio_count = 0;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    Eigen::VectorXd u = A * v;
    Eigen::Index arg;
    u.cwiseAbs().maxCoeff(&arg);
    const double next = u(arg) / v(arg);
    u /= u(arg);
    const double delta = (u - v).cwiseAbs().maxCoeff();
    if (prev_delta > 0 && delta > 0 && it > 3) {
      ratio_sum += std::log(delta / prev_delta);
      ++ratio_count;
    }
    prev_delta = delta;
    v = u;
    const bool settled = it > 2 && std::abs(next - lambda) <= cfg.eigen_tol * std::abs(next) && delta < 1e-14;
    lambda = next;
    out.iterations = it;
    if (settled || delta == 0) break;
    if (it == cfg.max_iterations) {
      throw NumericalError("power iteration did not converge in " + std::to_string(it) + " iterations");
    }
  }
  // One Rayleigh-style refinement with the converged direction.
  const Eigen::VectorXd Av = A * v;
  lambda = Av.dot(v) / v.dot(v);
  out.lambda = lambda;
  out.residual = (Av - lambda * v).cwiseAbs().maxCoeff() / v.cwiseAbs().maxCoeff();
  out.gap_estimate = ratio_count > 0 ? std::exp(ratio_sum / ratio_count) : 0.0;
  out.vector.assign(v.data(), v.data() + n);
  return out;
}

struct SpectralModel {
  AlgorithmId algo;
  std::string cost_id;
  double s = 1, w = 0;
  double lambda = 0;
  FunctionModel eigenfunction;  // unit integral over I
  double gap_estimate = 0;
  double residual = 0;
};

/// Pressure constants at (1, 0) and the derived CLT/LLT constants.
struct ConstantsBundle {
  AlgorithmId algo = AlgorithmId::G;
  std::string cost_id;
  OperatorConfig config;
  double lambda_10 = 0;    // lambda(1, 0)
  double residual = 0;
  double gap_estimate = 0;
  double dL_ds = 0;        // Lambda'(1)
  double dL_dw = 0;        // Lambda'_w(1, 0), finite differences
  double dL_dw_analytic = 0;  // same from the differentiated operator
  double d2L_ds2 = 0;      // Lambda''(1)
  double d2L_dw2 = 0;      // Lambda''_{w^2}(1, 0)
  double d2L_dsdw = 0;     // Lambda''_{sw}(1, 0) = chi(c)
  double entropy_closed_form = 0;
  double mu = 0;
  double delta2 = 0;
  double mu_c = 0;
  double delta2_c = 0;
  double mu_hat = 0;       // Lambda'_w(1, 0)
  double mu_hat_closed = 0;
  double mu_hat_tail = 0;
  double delta_hat2 = 0;
  double chi = 0;
  double delta2_c_decomposition = 0;
  bool muc_check = false;  // mu(c) = mu * mu^(c) within 1e-8 relative
  bool decomposition_check = false;
};

/// lambda(s, w) with memoisation, pressure derivatives and sigma(w) for one
/// algorithm and cost.
class SpectralSolver {
 public:
  SpectralSolver(AlgorithmId id, DigitCost cost, OperatorConfig cfg = {})
      : op_(id, std::move(cost), cfg) {}

  const TransferOperator& op() const { return op_; }

  EigenResult eigen(double s, double w) const { return dominant_eigen(op_.assemble(s, w), op_.config()); }

  double lambda(double s, double w) const {
    const auto key = std::make_pair(s, w);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const EigenResult r = eigen(s, w);
    if (r.residual > 1e-10) {
      throw NumericalError("eigen residual " + std::to_string(r.residual) + " exceeds 1e-10");
    }
    memo_[key] = r.lambda;
    return r.lambda;
  }

  double pressure(double s, double w) const { return std::log(lambda(s, w)); }

  SpectralModel model(double s, double w) const {
    const EigenResult r = eigen(s, w);
    for (double v : r.vector) {
      if (!(v > 0)) throw NumericalError("dominant eigenfunction is not positive");
    }
    std::vector<double> vals = r.vector;
    const double mass = op_.grid().integrate(vals);
    for (double& v : vals) v /= mass;
    return SpectralModel{op_.algo(), op_.cost().descriptor(), s, w, r.lambda,
                         FunctionModel(op_.grid(), std::move(vals)), r.gap_estimate, r.residual};
  }

  /// Invariant density: eigenfunction at (1, 0) with unit integral.
  FunctionModel invariant_density() const { return model(1.0, 0.0).eigenfunction; }

  /// Lambda'_w(1, 0) = integral of H'_w[f1] over I, using Lebesgue measure as
  /// the left eigenvector of H_{1,0}.
  double dL_dw_analytic() const {
    const SpectralModel m = model(1.0, 0.0);
    const Eigen::MatrixXd D = op_.assemble(1.0, 0.0, BranchWeight::CostTimesExp);
    const auto& f = m.eigenfunction.values();
    Eigen::VectorXd fv = Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size()));
    const Eigen::VectorXd g = D * fv;
    return op_.grid().integrate(std::vector<double>(g.data(), g.data() + g.size())) / m.lambda;
  }

  /// sigma(nu): root of lambda(sigma, nu) = 1 near 1, by bisection then secant.
  double solve_sigma(double nu) const {
    auto g = [&](double s) { return lambda(s, nu) - 1.0; };
    double lo = 1.0 - 0.1, hi = 1.0 + 0.1;
    double glo = g(lo), ghi = g(hi);
    for (int expand = 0; glo * ghi > 0 && expand < 4; ++expand) {
      lo = 0.5 + (lo - 0.5) / 2;
      hi = 1.0 + 2 * (hi - 1.0);
      glo = g(lo);
      ghi = g(hi);
    }
    if (glo * ghi > 0) throw NumericalError("solve_sigma: no bracket for nu = " + std::to_string(nu));
    for (int i = 0; i < 30 && hi - lo > 1e-6; ++i) {
      const double mid = 0.5 * (lo + hi);
      const double gm = g(mid);
      if ((gm > 0) == (glo > 0)) {
        lo = mid;
        glo = gm;
      } else {
        hi = mid;
        ghi = gm;
      }
    }
    double x0 = lo, x1 = hi, g0 = glo, g1 = ghi;
    for (int i = 0; i < 50; ++i) {
      if (g1 == g0) break;
      const double x2 = x1 - g1 * (x1 - x0) / (g1 - g0);
      x0 = x1;
      g0 = g1;
      x1 = x2;
      g1 = g(x1);
      if (std::abs(g1) < 1e-14 || std::abs(x1 - x0) < 1e-15) break;
    }
    return x1;
  }

  struct Steps {
    double first = 1e-3;
    double second = 1e-2;
  };

  ConstantsBundle constants() const { return constants(Steps{1e-3, 1e-2}); }

  /// Lambda'_w(1, 0) by Richardson-extrapolated central differences.
  double dL_dw(double h = 1e-3) const {
    auto f = [&](double e) { return pressure(1.0, e); };
    const double a = (f(h) - f(-h)) / (2 * h);
    const double c = (f(h / 2) - f(-h / 2)) / h;
    return (4 * c - a) / 3;
  }

  /// Lambda''_{w^2}(1, 0), the variance rate of Birkhoff sums.
  double d2L_dw2(double h = 1e-2) const {
    auto f = [&](double e) { return pressure(1.0, e); };
    const double f0 = f(0.0);
    const double a = (f(h) - 2 * f0 + f(-h)) / (h * h);
    const double c = (f(h / 2) - 2 * f0 + f(-h / 2)) / (h * h / 4);
    return (4 * c - a) / 3;
  }

  ConstantsBundle constants(Steps steps) const {
    if (!op_.charges_some_digit()) {
      throw ConfigError("cost " + op_.cost().descriptor() + " vanishes on every digit of " +
                        std::string(name(op_.algo())));
    }
    ConstantsBundle b;
    b.algo = op_.algo();
    b.cost_id = op_.cost().descriptor();
    b.config = op_.config();
    const EigenResult base = eigen(1.0, 0.0);
    b.lambda_10 = base.lambda;
    b.residual = base.residual;
    b.gap_estimate = base.gap_estimate;

    auto L = [&](double s, double w) { return pressure(s, w); };
    const double h1 = steps.first, h2 = steps.second;
    auto d1 = [&](auto f, double h) {
      const double a = (f(h) - f(-h)) / (2 * h);
      const double c = (f(h / 2) - f(-h / 2)) / h;
      return (4 * c - a) / 3;
    };
    auto d2 = [&](auto f, double h) {
      const double f0 = f(0.0);
      const double a = (f(h) - 2 * f0 + f(-h)) / (h * h);
      const double c = (f(h / 2) - 2 * f0 + f(-h / 2)) / (h * h / 4);
      return (4 * c - a) / 3;
    };
    auto mixed = [&](double h) {
      auto m = [&](double k) { return (L(1 + k, k) - L(1 + k, -k) - L(1 - k, k) + L(1 - k, -k)) / (4 * k * k); };
      return (4 * m(h / 2) - m(h)) / 3;
    };
    b.dL_ds = d1([&](double e) { return L(1 + e, 0); }, h1);
    b.dL_dw = d1([&](double e) { return L(1, e); }, h1);
    b.d2L_ds2 = d2([&](double e) { return L(1 + e, 0); }, h2);
    b.d2L_dw2 = d2([&](double e) { return L(1, e); }, h2);
    b.d2L_dsdw = mixed(h2);
    b.dL_dw_analytic = dL_dw_analytic();
    b.entropy_closed_form = Algorithm::of(op_.algo()).entropy();

    const MuHat closed = mu_hat_closed_form(op_.algo(), op_.cost(), op_.config().m_cap);
    b.mu_hat_closed = closed.value;
    b.mu_hat_tail = closed.tail_bound;

    const double A = std::abs(b.dL_ds);
    b.mu = 2.0 / A;
    b.delta2 = 2.0 * b.d2L_ds2 / (A * A * A);
    b.mu_hat = b.dL_dw;
    b.delta_hat2 = b.d2L_dw2;
    b.chi = b.d2L_dsdw;
    b.mu_c = -2.0 * b.dL_dw / b.dL_ds;
    b.delta2_c = 2.0 * b.dL_dw * b.dL_dw * b.d2L_ds2 / (A * A * A) + 4.0 * b.dL_dw * b.d2L_dsdw / (A * A) +
                 2.0 * b.d2L_dw2 / A;
    // Theorem-style decomposition, with the closed-form mu^ when it is exact.
    const double mh = closed.tail_bound == 0 ? closed.value : b.mu_hat;
    b.delta2_c_decomposition = mh * mh * b.delta2 + b.mu * b.delta_hat2 + b.mu * b.mu * mh * b.chi;
    b.muc_check = std::abs(b.mu_c - b.mu * mh) <= 1e-8 * std::abs(b.mu_c);
    b.decomposition_check = std::abs(b.delta2_c - b.delta2_c_decomposition) <= 1e-8 * std::abs(b.delta2_c);

    if (!(b.dL_ds < 0)) throw NumericalError("Lambda'(1) is not negative");
    if (!(b.d2L_ds2 > 0)) throw NumericalError("Lambda''(1) is not positive");
    if (!(b.delta2_c > 0)) throw NumericalError("delta^2(c) is not positive");
    return b;
  }

 private:
  TransferOperator op_;
  mutable std::map<std::pair<double, double>, double> memo_;
};

/// Cross-validation of a bundle: Lambda'_w against the closed-form mu^ and
/// |Lambda'(1)| against the closed-form entropy. Throws NumericalError.
inline void cross_validate(const ConstantsBundle& b) {
  const double mu_tol = std::max(1e-7, b.mu_hat_tail);
  if (std::abs(b.dL_dw - b.mu_hat_closed) > mu_tol) {
    throw NumericalError("Lambda'_w(1,0) = " + std::to_string(b.dL_dw) + " disagrees with the closed-form mu^ " +
                         std::to_string(b.mu_hat_closed));
  }
  const double ent_tol = b.algo == AlgorithmId::G ? 1e-6 : 1e-4;
  if (std::abs(std::abs(b.dL_ds) - b.entropy_closed_form) > ent_tol * b.entropy_closed_form) {
    throw NumericalError("|Lambda'(1)| disagrees with the closed-form entropy");
  }
}

}  // namespace euclid
