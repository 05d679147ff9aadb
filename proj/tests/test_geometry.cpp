#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "igamortar/benchmarks.hpp"

using namespace igamortar;

namespace {

// Unit-square slave with a quadratic bump of height h on its north edge, straight master above.
MultipatchDomain bump_domain(double h, double tol) {
  const KnotVector quad = KnotVector::uniform(2, 1);
  const KnotVector lin = KnotVector::uniform(1, 1);
  std::vector<Vec2> cps{{0, 0}, {0, 0.5}, {0.5, 0}, {0.5, 0.5 + 2 * h}, {1, 0}, {1, 0.5}};
  MultipatchDomain d;
  d.patches = {NurbsPatch(quad, lin, cps), rectangle_patch(0, 1, 0.5, 1)};
  d.interfaces = {Interface{1, 0, Face::South, Face::North}};
  d.coefficients.resize(2);
  d.gap_tolerance = tol;
  return d;
}

}  // namespace

TEST(GeometryTest, UnitSquareIsTheIdentity) {
  const NurbsPatch P = NurbsPatch::unit_square();
  for (double a : {0.0, 0.3, 1.0})
    for (double b : {0.0, 0.6, 1.0}) {
      const Vec2 x = map_point(P, {a, b});
      EXPECT_NEAR(x[0], a, 1e-15);
      EXPECT_NEAR(x[1], b, 1e-15);
      const Mat2 J = jacobian(P, {a, b});
      EXPECT_NEAR(J(0, 0), 1.0, 1e-15);
      EXPECT_NEAR(J(0, 1), 0.0, 1e-15);
      EXPECT_NEAR(J(1, 0), 0.0, 1e-15);
      EXPECT_NEAR(J(1, 1), 1.0, 1e-15);
    }
}

TEST(GeometryTest, QuarterAnnulusIsExact) {
  const NurbsPatch P = quarter_annulus_patch(0.2, 2.0);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int s = 0; s < 100; ++s) {
    const double t = u(rng);
    EXPECT_NEAR(norm(map_point(P, {0.0, t})), 0.2, 1e-14);
    EXPECT_NEAR(norm(map_point(P, {1.0, t})), 2.0, 1e-14);
    const double z1 = u(rng);
    EXPECT_NEAR(norm(map_point(P, {z1, t})), 0.2 + 1.8 * z1, 1e-13);
  }
  const Vec2 start = map_point(P, {1.0, 0.0}), end = map_point(P, {1.0, 1.0});
  EXPECT_NEAR(start[0], 2.0, 1e-15);
  EXPECT_NEAR(start[1], 0.0, 1e-15);
  EXPECT_NEAR(end[0], 0.0, 1e-15);
  EXPECT_NEAR(end[1], 2.0, 1e-15);
}

TEST(GeometryTest, AffineJacobianAndEdgeMeasures) {
  const NurbsPatch P = rectangle_patch(0, 2, 0, 3);
  const Mat2 J = jacobian(P, {0.4, 0.7});
  EXPECT_NEAR(J(0, 0), 2.0, 1e-15);
  EXPECT_NEAR(J(1, 1), 3.0, 1e-15);
  EXPECT_NEAR(J(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(J(1, 0), 0.0, 1e-15);
  EXPECT_NEAR(edge_measure(P, Face::South, 0.3), 2.0, 1e-15);
  EXPECT_NEAR(edge_measure(P, Face::North, 0.3), 2.0, 1e-15);
  EXPECT_NEAR(edge_measure(P, Face::East, 0.3), 3.0, 1e-15);
  EXPECT_NEAR(edge_measure(P, Face::West, 0.3), 3.0, 1e-15);
}

TEST(GeometryTest, JacobianMatchesFiniteDifferences) {
  const NurbsPatch P = quarter_annulus_patch(0.2, 2.0);
  const double h = 1e-6;
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int s = 0; s < 50; ++s) {
    const Vec2 z{u(rng), u(rng)};
    const Mat2 J = jacobian(P, z);
    for (int c = 0; c < 2; ++c) {
      Vec2 zp = z, zm = z;
      zp[c] += h;
      zm[c] -= h;
      const Vec2 fd = (1.0 / (2 * h)) * (map_point(P, zp) - map_point(P, zm));
      EXPECT_NEAR(J(0, c), fd[0], 1e-7);
      EXPECT_NEAR(J(1, c), fd[1], 1e-7);
    }
  }
}

TEST(GeometryTest, OutwardNormals) {
  const NurbsPatch S = NurbsPatch::unit_square();
  const Vec2 e = outward_normal(S, Face::East, 0.5), s = outward_normal(S, Face::South, 0.5);
  EXPECT_NEAR(e[0], 1.0, 1e-15);
  EXPECT_NEAR(e[1], 0.0, 1e-15);
  EXPECT_NEAR(s[0], 0.0, 1e-15);
  EXPECT_NEAR(s[1], -1.0, 1e-15);
  const NurbsPatch A = quarter_annulus_patch(0.2, 2.0);
  for (double t : {0.1, 0.5, 0.9}) {
    const Vec2 x = map_point(A, {0.0, t});
    const Vec2 n = outward_normal(A, Face::West, t);
    EXPECT_NEAR(n[0], -x[0] / norm(x), 1e-13);
    EXPECT_NEAR(n[1], -x[1] / norm(x), 1e-13);
  }
}

TEST(GeometryTest, DegenerateMapsAndBadParameters) {
  const NurbsPatch flat = NurbsPatch::bilinear({0, 0}, {1, 0}, {2, 0}, {3, 0});
  EXPECT_THROW(jacobian(flat, {0.5, 0.5}), GeometryError);
  EXPECT_THROW(map_point(NurbsPatch::unit_square(), {1.2, 0.5}), DomainError);
  EXPECT_THROW(NurbsPatch(KnotVector::uniform(1, 1), KnotVector::uniform(1, 1), {{0, 0}}), PreconditionError);
  MultipatchDomain d;
  d.patches = {flat};
  d.coefficients.resize(1);
  EXPECT_THROW(d.validate(), GeometryError);
}

TEST(GeometryTest, InversionRoundTrip) {
  const NurbsPatch P = quarter_annulus_patch(0.2, 2.0);
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int s = 0; s < 100; ++s) {
    const Vec2 z{u(rng), u(rng)};
    const auto r = invert_point(P, map_point(P, z));
    EXPECT_LT(r.residual, 1e-12);
    EXPECT_NEAR(r.zeta[0], z[0], 1e-9);
    EXPECT_NEAR(r.zeta[1], z[1], 1e-9);
  }
  for (int s = 0; s < 20; ++s) {
    const double t = u(rng);
    const auto r = invert_point(P, map_point(P, {1.0, t}), Face::East);
    EXPECT_NEAR(r.zeta[1], t, 1e-10);
  }
}

TEST(GeometryTest, InversionFailureReportsBestResidual) {
  const NurbsPatch P = quarter_annulus_patch(0.2, 2.0);
  try {
    invert_point(P, {1.5, 1.5}, Face::East, 1, 0.0);
    FAIL() << "expected an inversion error";
  } catch (const InversionError& e) {
    EXPECT_TRUE(std::isfinite(e.best_residual()));
    EXPECT_NEAR(e.point()[0], 1.5, 0.0);
  }
}

TEST(GeometryTest, GapResidualOfCurvedInterface) {
  const double h = 1e-3;
  MultipatchDomain d = bump_domain(h, 1e-2);
  const Vec2 peak = map_point(d.patches[0], {0.5, 1.0});
  EXPECT_NEAR(peak[1], 0.5 + h, 1e-15);
  const auto r = invert_point(d.patches[1], peak, Face::South);
  EXPECT_NEAR(r.residual, h, 1e-12);
  EXPECT_NEAR(r.zeta[0], 0.5, 1e-10);
  EXPECT_NEAR(d.interface_gap(0), h, 1e-12);
  EXPECT_NO_THROW(d.validate());
  MultipatchDomain strict = bump_domain(h, 1e-8);
  EXPECT_THROW(strict.validate(), GeometryError);
}

TEST(GeometryTest, PatchRefinementKeepsTheMap) {
  const NurbsPatch P = quarter_annulus_patch(0.2, 2.0);
  const NurbsPatch Q = insert_knot(insert_knot(P, 1, 0.3), 0, 0.7);
  const NurbsPatch R = refine_patch(P, 1, 2);
  EXPECT_EQ(Q.size(0), P.size(0) + 1);
  EXPECT_EQ(Q.size(1), P.size(1) + 1);
  EXPECT_EQ(R.knots(1).num_elements(), 4);
  std::mt19937 rng(14);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int s = 0; s < 50; ++s) {
    const Vec2 z{u(rng), u(rng)};
    const Vec2 x = map_point(P, z), xq = map_point(Q, z), xr = map_point(R, z);
    EXPECT_NEAR(norm(x - xq), 0.0, 1e-14);
    EXPECT_NEAR(norm(x - xr), 0.0, 1e-14);
  }
}

TEST(DomainTest, ValidationAndCrossPoints) {
  MultipatchDomain two = two_squares_domain(true);
  two.validate();
  EXPECT_FALSE(two.interfaces[0].reversed);
  EXPECT_EQ(two.cross_points(0), std::make_pair(true, true));
  MultipatchDomain open = two_squares_domain(false);
  open.validate();
  EXPECT_EQ(open.cross_points(0), std::make_pair(false, false));
  MultipatchDomain corner = corner_domain();
  corner.validate();
  for (int l = 0; l < corner.num_interfaces(); ++l) EXPECT_EQ(corner.cross_points(l), std::make_pair(true, true));

  MultipatchDomain tagged = two_squares_domain(true);
  tagged.boundary.push_back({0, Face::East, BoundaryKind::Neumann});
  EXPECT_THROW(tagged.validate(), InputError);
  MultipatchDomain missing = two_squares_domain(true);
  missing.interfaces[0].master = 5;
  EXPECT_THROW(missing.validate(), InputError);
  MultipatchDomain self = two_squares_domain(true);
  self.interfaces[0].master = 0;
  EXPECT_THROW(self.validate(), InputError);
}

TEST(DomainTest, ReversedInterfaceIsDetected) {
  MultipatchDomain d = two_squares_domain(true);
  // mirror the master patch vertically so its west face runs downwards
  d.patches[1] = NurbsPatch::bilinear({1, 1}, {2, 1}, {1, 0}, {2, 0});
  d.validate();
  EXPECT_TRUE(d.interfaces[0].reversed);
}

TEST(DomainTest, PlateWithHoleGeometry) {
  MultipatchDomain d = plate_with_hole_domain(0.2, 2.0, 1.0, 1.0, 0.2);
  d.validate();
  for (double t : {0.0, 0.3, 0.7, 1.0}) {
    EXPECT_NEAR(norm(map_point(d.patches[0], {0.0, t})), 0.2, 1e-14);
    EXPECT_NEAR(norm(map_point(d.patches[1], {0.0, t})), 0.2, 1e-14);
  }
  EXPECT_LT(d.interface_gap(0), 1e-12);
}
