#pragma once

// Multipatch domains of the benchmark problems.

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "igamortar/dense.hpp"
#include "igamortar/multipatch.hpp"

namespace igamortar {

/// Quarter annulus r_in < r < r_out, 0 < phi < pi/2: zeta1 radial (linear), zeta2
/// angular (exact quadratic arc).
inline NurbsPatch quarter_annulus_patch(double r_in, double r_out) {
  const double w = std::sqrt(0.5);
  std::vector<Vec2> cps;
  std::vector<double> ws;
  for (double r : {r_in, r_out}) {
    cps.insert(cps.end(), {Vec2{r, 0.0}, Vec2{r, r}, Vec2{0.0, r}});
    ws.insert(ws.end(), {1.0, w, 1.0});
  }
  return NurbsPatch(KnotVector::uniform(1, 1), KnotVector::uniform(2, 1), cps, ws);
}

/// Two-patch quarter annulus split along the arc r = r_split. Patch 0 (inner, slave)
/// east face meets patch 1 (outer, master) west face. Dirichlet on both arcs, Neumann on
/// the straight edges.
inline MultipatchDomain annulus_domain(double r_in = 0.2, double r_split = 1.1, double r_out = 2.0) {
  MultipatchDomain d;
  d.patches = {quarter_annulus_patch(r_in, r_split), quarter_annulus_patch(r_split, r_out)};
  d.interfaces = {Interface{1, 0, Face::West, Face::East}};
  d.boundary = {{0, Face::West, BoundaryKind::Dirichlet}, {1, Face::East, BoundaryKind::Dirichlet},
                {0, Face::South, BoundaryKind::Neumann},  {0, Face::North, BoundaryKind::Neumann},
                {1, Face::South, BoundaryKind::Neumann},  {1, Face::North, BoundaryKind::Neumann}};
  d.coefficients.resize(2);
  return d;
}

/// Single-patch annulus with a C0 radial knot at r_split: the conforming counterpart of
/// annulus_domain.
inline MultipatchDomain annulus_merged_domain(double r_in = 0.2, double r_split = 1.1, double r_out = 2.0) {
  const double w = std::sqrt(0.5);
  std::vector<Vec2> cps;
  std::vector<double> ws;
  for (double r : {r_in, r_split, r_out}) {
    cps.insert(cps.end(), {Vec2{r, 0.0}, Vec2{r, r}, Vec2{0.0, r}});
    ws.insert(ws.end(), {1.0, w, 1.0});
  }
  MultipatchDomain d;
  d.patches = {NurbsPatch(KnotVector::uniform(1, 2), KnotVector::uniform(2, 1), cps, ws)};
  d.boundary = {{0, Face::West, BoundaryKind::Dirichlet},
                {0, Face::East, BoundaryKind::Dirichlet},
                {0, Face::South, BoundaryKind::Neumann},
                {0, Face::North, BoundaryKind::Neumann}};
  d.coefficients.resize(1);
  return d;
}

/// Axis-aligned rectangle [x0,x1] x [y0,y1] as a bilinear patch.
inline NurbsPatch rectangle_patch(double x0, double x1, double y0, double y1) {
  return NurbsPatch::bilinear({x0, y0}, {x1, y0}, {x0, y1}, {x1, y1});
}

/// [0,1]^2 (patch 0, slave) and [1,2]x[0,1] (patch 1, master) glued along x = 1. The
/// horizontal edges are Dirichlet when `dirichlet_ends`, Neumann otherwise; the outer
/// vertical edges are Dirichlet.
inline MultipatchDomain two_squares_domain(bool dirichlet_ends) {
  MultipatchDomain d;
  d.patches = {rectangle_patch(0, 1, 0, 1), rectangle_patch(1, 2, 0, 1)};
  d.interfaces = {Interface{1, 0, Face::West, Face::East}};
  const auto ends = dirichlet_ends ? BoundaryKind::Dirichlet : BoundaryKind::Neumann;
  d.boundary = {{0, Face::West, BoundaryKind::Dirichlet}, {1, Face::East, BoundaryKind::Dirichlet},
                {0, Face::South, ends}, {0, Face::North, ends}, {1, Face::South, ends}, {1, Face::North, ends}};
  d.coefficients.resize(2);
  return d;
}

/// [0,2]x[0,1] with a C0 knot at x = 1: conforming counterpart of two_squares_domain.
inline MultipatchDomain merged_rectangle_domain(bool dirichlet_ends) {
  MultipatchDomain d;
  std::vector<Vec2> cps{{0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, 0}, {2, 1}};
  d.patches = {NurbsPatch(KnotVector::uniform(1, 2), KnotVector::uniform(1, 1), cps)};
  const auto ends = dirichlet_ends ? BoundaryKind::Dirichlet : BoundaryKind::Neumann;
  d.boundary = {{0, Face::West, BoundaryKind::Dirichlet}, {0, Face::East, BoundaryKind::Dirichlet},
                {0, Face::South, ends}, {0, Face::North, ends}};
  d.coefficients.resize(1);
  return d;
}

/// L-shaped domain (-1,1)^2 minus [0,1]x[-1,0] with the re-entrant corner at the origin,
/// split into three bilinear patches. Every interface end is a cross point.
inline MultipatchDomain corner_domain() {
  const Vec2 P{-0.4, 0.4}, M{-0.2, 0.2}, V1{0, 0}, V2{1, 0}, V3{1, 1}, T{0, 1}, V4{-1, 1}, W{-1, 0},
      V5{-1, -1}, V6{0, -1};
  MultipatchDomain d;
  const KnotVector lin1 = KnotVector::uniform(1, 1);
  const KnotVector lin2 = KnotVector::uniform(1, 2);
  // patch 0: W -> V5 -> V6 along zeta1 at zeta2 = 0, P -> M -> V1 at zeta2 = 1
  d.patches.emplace_back(lin2, lin1, std::vector<Vec2>{W, P, V5, M, V6, V1});
  // patch 1: corners W, P, V4, T
  d.patches.push_back(NurbsPatch::bilinear(W, P, V4, T));
  // patch 2: V1 -> M -> P along zeta2 at zeta1 = 0, V2 -> V3 -> T at zeta1 = 1
  d.patches.emplace_back(lin1, lin2, std::vector<Vec2>{V1, M, P, V2, V3, T});
  d.interfaces = {Interface{0, 2, Face::North, Face::West},
                  Interface{1, 2, Face::East, Face::North},
                  Interface{0, 1, Face::West, Face::South}};
  d.boundary = {{0, Face::South, BoundaryKind::Dirichlet}, {0, Face::East, BoundaryKind::Dirichlet},
                {1, Face::North, BoundaryKind::Dirichlet}, {1, Face::West, BoundaryKind::Dirichlet},
                {2, Face::South, BoundaryKind::Dirichlet}, {2, Face::East, BoundaryKind::Dirichlet}};
  d.coefficients.resize(3);
  return d;
}

/// Quarter plate (0,L)^2 minus the disc of radius R, two patches split along the diagonal.
/// Patch 0 (slave) covers 0 < phi < pi/4, patch 1 (master) pi/4 < phi < pi/2; zeta1 runs
/// from the hole outwards and is quadratic with the middle ring at fraction `grading` of
/// the way out (0.5 gives a uniform radial parametrization, smaller values cluster
/// elements at the hole). Symmetry conditions u_y = 0 on y = 0 and u_x = 0 on x = 0,
/// tractions on the outer edges and on the hole.
inline MultipatchDomain plate_with_hole_domain(double R, double L, double lambda, double mu,
                                               double grading = 0.5) {
  const double w = std::cos(std::numbers::pi / 8.0);
  const double t = std::tan(std::numbers::pi / 8.0);
  const double c = std::sqrt(0.5);
  const KnotVector radial = KnotVector::uniform(2, 1);
  const KnotVector arc = KnotVector::uniform(2, 1);
  auto make = [&](const std::array<Vec2, 3>& inner, const std::array<Vec2, 3>& outer) {
    std::vector<Vec2> cps;
    std::vector<double> ws;
    for (double f : {0.0, grading, 1.0})
      for (int j = 0; j < 3; ++j) {
        cps.push_back(inner[j] + f * (outer[j] - inner[j]));
        ws.push_back(j == 1 ? w : 1.0);
      }
    return NurbsPatch(radial, arc, cps, ws);
  };
  MultipatchDomain d;
  d.patches.push_back(make({Vec2{R, 0}, Vec2{R, R * t}, Vec2{R * c, R * c}}, {Vec2{L, 0}, Vec2{L, L * t}, Vec2{L, L}}));
  d.patches.push_back(make({Vec2{R * c, R * c}, Vec2{R * t, R}, Vec2{0, R}}, {Vec2{L, L}, Vec2{L * t, L}, Vec2{0, L}}));
  d.interfaces = {Interface{1, 0, Face::South, Face::North}};
  d.boundary = {{0, Face::South, BoundaryKind::Dirichlet, {false, true}},
                {0, Face::East, BoundaryKind::Neumann},
                {0, Face::West, BoundaryKind::Neumann},
                {1, Face::North, BoundaryKind::Dirichlet, {true, false}},
                {1, Face::East, BoundaryKind::Neumann},
                {1, Face::West, BoundaryKind::Neumann}};
  d.coefficients.resize(2);
  for (auto& co : d.coefficients) {
    co.lambda = lambda;
    co.mu = mu;
  }
  return d;
}

/// Coefficients of the degree-p spline on kv interpolating g at the Greville points.
inline std::vector<double> greville_interpolant(const KnotVector& kv, const std::function<double(double)>& g) {
  const int n = kv.size();
  DenseMatrix C(n, n);
  std::vector<double> rhs(n);
  for (int k = 0; k < n; ++k) {
    const double t = kv.greville(k);
    const auto b = eval_basis(kv, t, 0);
    for (int a = 0; a <= kv.degree(); ++a) C(k, b.first() + a) = b(0, a);
    rhs[k] = g(t);
  }
  return dense_solve(C, rhs);
}

/// Unit square split by the curve y = c(x). Each side approximates c by its own
/// degree-p Greville interpolant on its own mesh, so the two interface curves differ by
/// the interpolation error (a gap of order h^{p+1}). The lower patch (0, slave) has
/// slave_elements columns, the upper patch (1, master) master_elements; both use
/// rows_elements rows. Dirichlet on y = 0 and y = 1, Neumann on x = 0 and x = 1.
inline MultipatchDomain split_square_domain(int degree, int slave_elements, int master_elements,
                                            int rows_elements, const std::function<double(double)>& c) {
  auto make = [&](int ex, bool upper) {
    const KnotVector kx = KnotVector::uniform(degree, ex);
    const KnotVector ky = KnotVector::uniform(degree, rows_elements);
    const auto cy = greville_interpolant(kx, c);
    std::vector<Vec2> cps;
    for (int i = 0; i < kx.size(); ++i) {
      const double x = kx.greville(i);
      for (int j = 0; j < ky.size(); ++j) {
        const double s = ky.greville(j);
        const double y = upper ? cy[i] + s * (1.0 - cy[i]) : s * cy[i];
        cps.push_back({x, y});
      }
    }
    return NurbsPatch(kx, ky, cps);
  };
  MultipatchDomain d;
  d.patches = {make(slave_elements, false), make(master_elements, true)};
  d.interfaces = {Interface{1, 0, Face::South, Face::North}};
  d.boundary = {{0, Face::South, BoundaryKind::Dirichlet}, {1, Face::North, BoundaryKind::Dirichlet},
                {0, Face::West, BoundaryKind::Neumann},   {0, Face::East, BoundaryKind::Neumann},
                {1, Face::West, BoundaryKind::Neumann},   {1, Face::East, BoundaryKind::Neumann}};
  d.coefficients.resize(2);
  d.gap_tolerance = 0.05;
  return d;
}

}  // namespace igamortar
