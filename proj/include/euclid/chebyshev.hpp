#pragma once

#include "euclid/errors.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

namespace euclid {

/// Chebyshev-Lobatto nodes of degree n mapped to [a, b], with barycentric
/// interpolation and Clenshaw-Curtis quadrature weights.
class ChebyshevGrid {
 public:
  ChebyshevGrid(int degree, double a, double b) : n_(degree), a_(a), b_(b) {
    if (degree < 1) throw ConfigError("Chebyshev degree must be >= 1");
    nodes_.resize(static_cast<std::size_t>(n_ + 1));
    bary_.resize(nodes_.size());
    for (int i = 0; i <= n_; ++i) {
      nodes_[static_cast<std::size_t>(i)] = from_unit(std::cos(std::numbers::pi * i / n_));
      double w = (i % 2 == 0) ? 1.0 : -1.0;
      if (i == 0 || i == n_) w *= 0.5;
      bary_[static_cast<std::size_t>(i)] = w;
    }
    // Clenshaw-Curtis: integrate the interpolant through its Chebyshev series.
    quad_.assign(nodes_.size(), 0.0);
    for (int i = 0; i <= n_; ++i) {
      double s = 0;
      for (int k = 0; k <= n_; k += 2) {
        double ck = 2.0 / n_ * std::cos(std::numbers::pi * i * k / n_);
        if (k == 0 || k == n_) ck *= 0.5;
        s += ck * 2.0 / (1.0 - static_cast<double>(k) * k);
      }
      if (i == 0 || i == n_) s *= 0.5;
      quad_[static_cast<std::size_t>(i)] = s * (b_ - a_) / 2;
    }
  }

  int degree() const { return n_; }
  std::size_t size() const { return nodes_.size(); }
  double a() const { return a_; }
  double b() const { return b_; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& quadrature_weights() const { return quad_; }

  /// Row r with p(y) = sum_i r[i] p(x_i) for every polynomial p of degree <= n.
  std::vector<double> interpolation_row(double y) const {
    std::vector<double> row(nodes_.size(), 0.0);
    double denom = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const double diff = y - nodes_[i];
      if (diff == 0.0) {
        std::fill(row.begin(), row.end(), 0.0);
        row[i] = 1.0;
        return row;
      }
      row[i] = bary_[i] / diff;
      denom += row[i];
    }
    for (double& r : row) r /= denom;
    return row;
  }

  double interpolate(const std::vector<double>& values, double y) const {
    const auto row = interpolation_row(y);
    double s = 0;
    for (std::size_t i = 0; i < row.size(); ++i) s += row[i] * values[i];
    return s;
  }

  double integrate(const std::vector<double>& values) const {
    double s = 0;
    for (std::size_t i = 0; i < values.size(); ++i) s += quad_[i] * values[i];
    return s;
  }

  /// Chebyshev coefficients of the interpolant (in the variable mapped to [-1, 1]).
  std::vector<double> coefficients(const std::vector<double>& values) const {
    std::vector<double> c(nodes_.size(), 0.0);
    for (int k = 0; k <= n_; ++k) {
      double s = 0;
      for (int i = 0; i <= n_; ++i) {
        double term = values[static_cast<std::size_t>(i)] * std::cos(std::numbers::pi * i * k / n_);
        if (i == 0 || i == n_) term *= 0.5;
        s += term;
      }
      s *= 2.0 / n_;
      if (k == 0 || k == n_) s *= 0.5;
      c[static_cast<std::size_t>(k)] = s;
    }
    return c;
  }

  double to_unit(double x) const { return (2 * x - a_ - b_) / (b_ - a_); }
  double from_unit(double t) const { return (a_ + b_) / 2 + (b_ - a_) / 2 * t; }

 private:
  int n_;
  double a_, b_;
  std::vector<double> nodes_, bary_, quad_;
};

/// Function stored by its values at the grid nodes.
class FunctionModel {
 public:
  FunctionModel(ChebyshevGrid grid, std::vector<double> values)
      : grid_(std::move(grid)), values_(std::move(values)), coeffs_(grid_.coefficients(values_)) {}

  const ChebyshevGrid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& coefficients() const { return coeffs_; }

  double operator()(double x) const { return grid_.interpolate(values_, x); }

  /// First derivative through the Chebyshev series (Clenshaw recurrence on the
  /// derivative coefficients).
  double derivative(double x) const {
    const std::size_t n = coeffs_.size() - 1;
    std::vector<double> d(coeffs_.size() + 1, 0.0);
    for (std::size_t k = n; k-- > 0;) d[k] = d[k + 2] + 2.0 * static_cast<double>(k + 1) * coeffs_[k + 1];
    d[0] *= 0.5;
    const double t = grid_.to_unit(x);
    double b1 = 0, b2 = 0;
    for (std::size_t k = n; k-- > 1;) {
      const double b0 = 2 * t * b1 - b2 + d[k];
      b2 = b1;
      b1 = b0;
    }
    const double v = t * b1 - b2 + d[0];
    return v * 2.0 / (grid_.b() - grid_.a());
  }

  double integral() const { return grid_.integrate(values_); }

 private:
  ChebyshevGrid grid_;
  std::vector<double> values_;
  std::vector<double> coeffs_;
};

}  // namespace euclid
