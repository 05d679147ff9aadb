#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "igamortar/core.hpp"

namespace igamortar {

/// Gauss-Legendre rule with q points on [-1,1]; exact for polynomials of degree 2q-1.
class QuadratureRule {
 public:
  explicit QuadratureRule(int q) : nodes_(q), weights_(q) {
    if (q < 1) throw PreconditionError("quadrature order must be positive");
    // Newton iteration on P_q starting from the Chebyshev-like guess.
    for (int i = 0; i < (q + 1) / 2; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 1; j <= q; ++j) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p2) / j;
        }
        dp = q * (x * p0 - p1) / (x * x - 1.0);
        const double dx = p0 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      // Recompute the derivative at the converged node for the weight.
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= q; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p2) / j;
      }
      dp = q * (x * p0 - p1) / (x * x - 1.0);
      nodes_[i] = -x;
      nodes_[q - 1 - i] = x;
      weights_[i] = weights_[q - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    if (q % 2 == 1) nodes_[q / 2] = 0.0;
  }

  int order() const { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

  /// Node i mapped to [a,b].
  double node(int i, double a, double b) const { return 0.5 * (a + b) + 0.5 * (b - a) * nodes_[i]; }
  double weight(int i, double a, double b) const { return 0.5 * (b - a) * weights_[i]; }

  template <typename F>
  double integrate(F&& f, double a, double b) const {
    double s = 0.0;
    for (int i = 0; i < order(); ++i) s += weight(i, a, b) * f(node(i, a, b));
    return s;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

}  // namespace igamortar
