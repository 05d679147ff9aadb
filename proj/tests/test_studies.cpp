#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "igamortar/studies.hpp"

using namespace igamortar;

namespace {

MultipatchDomain unit_square_dirichlet() {
  MultipatchDomain d;
  d.patches = {NurbsPatch::unit_square()};
  for (Face f : kAllFaces) d.boundary.push_back({0, f, BoundaryKind::Dirichlet});
  d.coefficients.resize(1);
  return d;
}

ManufacturedCase linear_case(std::function<MultipatchDomain()> make) {
  ManufacturedCase mc;
  mc.name = "linear";
  mc.domain = [make](int) { return make(); };
  mc.scalar = linear_field(0.3, 1.0, 2.0);
  return mc;
}

}  // namespace

TEST(SlopeTest, Examples) {
  const auto s = slope_fit({1.0, 1.0 / 8.0});
  ASSERT_EQ(s.size(), 1u);
  EXPECT_NEAR(s[0], 3.0, 1e-14);
  EXPECT_NEAR(slope_fit({1.100586e-03, 4.794994e-05})[0], 4.521, 5e-4);
  EXPECT_TRUE(std::isnan(slope_fit({1.0, 0.0})[0]));
}

TEST(SlopeTest, RecoversExactPowerLaws) {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> u(0.5, 6.0);
  for (int s = 0; s < 20; ++s) {
    const double p = u(rng), C = u(rng);
    std::vector<double> e, h;
    double hh = 0.3;
    for (int i = 0; i < 6; ++i) {
      h.push_back(hh);
      e.push_back(C * std::pow(hh, p));
      hh *= 0.4 + 0.1 * i;
    }
    for (double r : pairwise_slopes(e, h)) EXPECT_NEAR(r, p, 1e-12);
    EXPECT_NEAR(ls_slope(e, h, 6), p, 1e-12);
    EXPECT_NEAR(ls_slope(e, h), p, 1e-12);
  }
  EXPECT_THROW(ls_slope({1.0}, {1.0}), PreconditionError);
}

TEST(KirschTest, StressIsDivergenceFreeAndFollowsHookesLaw) {
  const double E = 1e5, nu = 0.3, a = 0.2, T = 10.0;
  const auto k = kirsch(a, T, E, nu);
  const double lam = lame_lambda(E, nu), mu = lame_mu(E, nu);
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> r(0.25, 2.0), th(0.0, std::numbers::pi / 2);
  const double h = 1e-5;
  for (int s = 0; s < 50; ++s) {
    const double rr = r(rng), tt = th(rng);
    const Vec2 x{rr * std::cos(tt), rr * std::sin(tt)};
    const auto g = k.grad(x);
    // gradient against central differences of the displacement
    for (int d = 0; d < 2; ++d) {
      Vec2 xp = x, xm = x;
      xp[d] += h;
      xm[d] -= h;
      const Vec2 fd = (1.0 / (2 * h)) * (k.u(xp) - k.u(xm));
      EXPECT_NEAR(g[0][d], fd[0], 1e-8);
      EXPECT_NEAR(g[1][d], fd[1], 1e-8);
    }
    const double exx = g[0][0], eyy = g[1][1], exy = 0.5 * (g[0][1] + g[1][0]);
    const Mat2 S = k.stress(x);
    EXPECT_NEAR(S(0, 0), lam * (exx + eyy) + 2 * mu * exx, 1e-8 * T);
    EXPECT_NEAR(S(1, 1), lam * (exx + eyy) + 2 * mu * eyy, 1e-8 * T);
    EXPECT_NEAR(S(0, 1), 2 * mu * exy, 1e-8 * T);
    EXPECT_NEAR(S(0, 1), S(1, 0), 0.0);
    double div[2] = {0.0, 0.0};
    for (int d = 0; d < 2; ++d) {
      Vec2 xp = x, xm = x;
      xp[d] += h;
      xm[d] -= h;
      const Mat2 Sp = k.stress(xp), Sm = k.stress(xm);
      for (int c = 0; c < 2; ++c) div[c] += (Sp(c, d) - Sm(c, d)) / (2 * h);
    }
    EXPECT_NEAR(div[0], 0.0, 1e-4 * T);
    EXPECT_NEAR(div[1], 0.0, 1e-4 * T);
  }
}

TEST(KirschTest, BoundaryBehaviour) {
  const auto k = kirsch(0.2, 10.0, 1e5, 0.3);
  for (double t : {0.1, 0.7, 1.3}) {
    const Vec2 n{std::cos(t), std::sin(t)};
    const Vec2 tr = k.stress(0.2 * n) * n;  // the hole is traction free
    EXPECT_NEAR(tr[0], 0.0, 1e-12);
    EXPECT_NEAR(tr[1], 0.0, 1e-12);
    const Mat2 far = k.stress(1e4 * n);
    EXPECT_NEAR(far(0, 0), 10.0, 1e-6);
    EXPECT_NEAR(far(1, 1), 0.0, 1e-6);
  }
  // symmetry planes carry no normal displacement
  EXPECT_NEAR(k.u({1.0, 0.0})[1], 0.0, 1e-15);
  EXPECT_NEAR(k.u({0.0, 1.0})[0], 0.0, 1e-15);
}

TEST(ErrorNormsTest, FieldsInTheSpaceHaveNoError) {
  const auto single = solve_level(linear_case(unit_square_dirichlet), parse_pairing("equal"), 1, 0);
  EXPECT_LT(single.errors.l2, 1e-11);
  EXPECT_LT(single.errors.broken_v, 1e-11);
  ManufacturedCase two = linear_case([] { return two_squares_domain(true); });
  two.extra_refine = {0, 1};
  const auto r = solve_level(two, parse_pairing("equal"), 2, 1);
  EXPECT_LT(r.errors.l2, 1e-11);
  EXPECT_LT(r.errors.broken_v, 1e-10);
  ASSERT_EQ(r.errors.dual.size(), 1u);
  EXPECT_LT(r.errors.dual[0], 1e-9);
  EXPECT_EQ(r.errors.l2_patch.size(), 2u);
}

TEST(ErrorNormsTest, QuadratureRefinementChangesLittle) {
  const auto mc = annulus_case(false, 0, 1);
  const auto r = solve_level(mc, parse_pairing("equal"), 2, 1);
  const ErrorRow fine = error_norms(r.disc, r.solution, mc, 40);
  EXPECT_NEAR(r.errors.l2, fine.l2, 1e-3 * fine.l2);
  EXPECT_NEAR(r.errors.broken_v, fine.broken_v, 1e-3 * fine.broken_v);
  EXPECT_NEAR(r.errors.dual[0], fine.dual[0], 1e-3 * fine.dual[0]);
}

TEST(ConvergenceTest, AnnulusQuadraticRate) {
  const auto rep = run_convergence(annulus_case(false, 1, 2), parse_pairing("equal"), 2, 4);
  ASSERT_EQ(rep.rows.size(), 4u);
  const auto e = column(rep, &ErrorRow::l2), h = column(rep, &ErrorRow::h);
  for (std::size_t i = 1; i < e.size(); ++i) EXPECT_LT(e[i], e[i - 1]);
  EXPECT_NEAR(pairwise_slopes(e, h).back(), 3.0, 0.15);
  for (const auto& row : rep.rows) EXPECT_LT(row.constraint_residual, 1e-9);
}

TEST(CasesTest, RegistryAndExpectedRates) {
  for (const auto& name : builtin_case_names()) EXPECT_EQ(builtin_case(name).name, name);
  EXPECT_THROW(builtin_case("nope"), InputError);
  const auto eq = expected_rates("annulus", parse_pairing("equal"), 3);
  EXPECT_EQ(eq.l2, 4.0);
  EXPECT_EQ(eq.broken_v, 3.0);
  EXPECT_FALSE(eq.lower_bound);
  const auto pm2 = expected_rates("annulus", parse_pairing("pm2"), 3);
  EXPECT_EQ(pm2.l2, 3.5);
  EXPECT_TRUE(pm2.lower_bound);
  EXPECT_NEAR(expected_rates("corner", parse_pairing("equal"), 4).broken_v, 2.0 / 3.0, 1e-15);
  EXPECT_TRUE(std::isnan(expected_rates("annulus", parse_pairing("pm1"), 3).l2));
}

TEST(CasesTest, CurvedSplitHasASmallGap) {
  const auto curved = split_square_case(true).domain(0);
  const double gap = curved.interface_gap(0, 200);
  EXPECT_GT(gap, 1e-4);
  EXPECT_LT(gap, 2e-3);
  EXPECT_LT(split_square_case(true).domain(2).interface_gap(0, 200), gap / 8);
  EXPECT_LT(split_square_case(false).domain(0).interface_gap(0), 1e-12);
}
