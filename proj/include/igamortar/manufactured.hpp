#pragma once

// Closed-form fields used by the convergence studies.

#include <array>
#include <cmath>
#include <functional>
#include <numbers>

#include "igamortar/multipatch.hpp"

namespace igamortar {

using GradientField = std::function<Vec2(const Vec2&)>;
/// Rows are the gradients of the two displacement components.
using TensorField = std::function<std::array<Vec2, 2>(const Vec2&)>;
using StressField = std::function<Mat2(const Vec2&)>;

/// Exact solution of -div(alpha grad u) + beta u = f with alpha = 1, beta = 0.
struct ScalarExact {
  ScalarField u;
  GradientField grad;
  ScalarField source;
};

struct ElasticExact {
  VectorField u;
  TensorField grad;
  StressField stress;
  VectorField body_force;
};

/// u = sin(a x) sin(b y).
inline ScalarExact sine_product(double a, double b) {
  ScalarExact e;
  e.u = [a, b](const Vec2& x) { return std::sin(a * x[0]) * std::sin(b * x[1]); };
  e.grad = [a, b](const Vec2& x) {
    return Vec2{a * std::cos(a * x[0]) * std::sin(b * x[1]), b * std::sin(a * x[0]) * std::cos(b * x[1])};
  };
  e.source = [a, b](const Vec2& x) { return (a * a + b * b) * std::sin(a * x[0]) * std::sin(b * x[1]); };
  return e;
}

/// Polar angle in [0, 2 pi).
inline double polar_angle(const Vec2& x) {
  double phi = std::atan2(x[1], x[0]);
  if (phi < 0.0) phi += 2.0 * std::numbers::pi;
  return phi;
}

/// Harmonic corner singularity u = r^{2/3} sin(2 phi / 3).
inline ScalarExact corner_singularity() {
  ScalarExact e;
  e.u = [](const Vec2& x) {
    const double r = norm(x);
    return r == 0.0 ? 0.0 : std::pow(r, 2.0 / 3.0) * std::sin(2.0 * polar_angle(x) / 3.0);
  };
  e.grad = [](const Vec2& x) {
    const double r = norm(x);
    const double phi = polar_angle(x);
    const double s = (2.0 / 3.0) * std::pow(r, -1.0 / 3.0);
    return Vec2{-s * std::sin(phi / 3.0), s * std::cos(phi / 3.0)};
  };
  e.source = constant_field(0.0);
  return e;
}

/// Linear polynomial u = c0 + c1 x + c2 y, reproduced exactly by every spline space.
inline ScalarExact linear_field(double c0, double c1, double c2) {
  ScalarExact e;
  e.u = [=](const Vec2& x) { return c0 + c1 * x[0] + c2 * x[1]; };
  e.grad = [=](const Vec2&) { return Vec2{c1, c2}; };
  e.source = constant_field(0.0);
  return e;
}

inline double lame_lambda(double E, double nu) { return E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)); }
inline double lame_mu(double E, double nu) { return E / (2.0 * (1.0 + nu)); }

/// Infinite plane-strain plate with a circular hole of radius a under remote tension T
/// along x.
inline ElasticExact kirsch(double a, double T, double E, double nu) {
  const double mu = lame_mu(E, nu);
  const double kappa = 3.0 - 4.0 * nu;
  ElasticExact e;
  e.u = [=](const Vec2& x) {
    const double r = norm(x), th = std::atan2(x[1], x[0]);
    const double c = a * T / (8.0 * mu);
    const double ux = c * (r / a * (kappa + 1.0) * std::cos(th) +
                           2.0 * a / r * ((1.0 + kappa) * std::cos(th) + std::cos(3.0 * th)) -
                           2.0 * a * a * a / (r * r * r) * std::cos(3.0 * th));
    const double uy = c * (r / a * (kappa - 3.0) * std::sin(th) +
                           2.0 * a / r * ((1.0 - kappa) * std::sin(th) + std::sin(3.0 * th)) -
                           2.0 * a * a * a / (r * r * r) * std::sin(3.0 * th));
    return Vec2{ux, uy};
  };
  e.stress = [=](const Vec2& x) {
    const double r = norm(x), th = std::atan2(x[1], x[0]);
    const double a2 = a * a / (r * r), a4 = a2 * a2;
    const double c2 = std::cos(2 * th), c4 = std::cos(4 * th), s2 = std::sin(2 * th), s4 = std::sin(4 * th);
    const double sxx = T * (1.0 - a2 * (1.5 * c2 + c4) + 1.5 * a4 * c4);
    const double syy = T * (-a2 * (0.5 * c2 - c4) - 1.5 * a4 * c4);
    const double sxy = T * (-a2 * (0.5 * s2 + s4) + 1.5 * a4 * s4);
    return Mat2{{sxx, sxy, sxy, syy}};
  };
  // u_x, u_y as sums of terms coef * r^k * trig(m theta), differentiated in polar form
  e.grad = [=](const Vec2& x) {
    struct Term {
      double coef;
      int k;
      int m;
    };
    const double c = a * T / (8.0 * mu);
    const std::array<Term, 4> tx{{{c * (kappa + 1.0) / a, 1, 1},
                                  {c * 2.0 * a * (1.0 + kappa), -1, 1},
                                  {c * 2.0 * a, -1, 3},
                                  {-c * 2.0 * a * a * a, -3, 3}}};
    const std::array<Term, 4> ty{{{c * (kappa - 3.0) / a, 1, 1},
                                  {c * 2.0 * a * (1.0 - kappa), -1, 1},
                                  {c * 2.0 * a, -1, 3},
                                  {-c * 2.0 * a * a * a, -3, 3}}};
    const double r = norm(x), th = std::atan2(x[1], x[0]);
    const double ct = std::cos(th), st = std::sin(th);
    auto grad_of = [&](const std::array<Term, 4>& terms, bool cosine) {
      double dr = 0.0, dth = 0.0;
      for (const auto& t : terms) {
        const double rk = std::pow(r, t.k);
        const double cm = std::cos(t.m * th), sm = std::sin(t.m * th);
        dr += t.coef * t.k * std::pow(r, t.k - 1) * (cosine ? cm : sm);
        dth += t.coef * rk * t.m * (cosine ? -sm : cm);
      }
      return Vec2{ct * dr - st / r * dth, st * dr + ct / r * dth};
    };
    return std::array<Vec2, 2>{grad_of(tx, true), grad_of(ty, false)};
  };
  e.body_force = [](const Vec2&) { return Vec2{0.0, 0.0}; };
  return e;
}

}  // namespace igamortar
