#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "igamortar/knot_vector.hpp"
#include "igamortar/quadrature.hpp"

using namespace igamortar;

namespace {

// Open knot vector with random degree, breakpoints and interior multiplicities <= p.
KnotVector random_kv(std::mt19937& rng, int max_degree = 5) {
  std::uniform_int_distribution<int> deg(1, max_degree);
  const int p = deg(rng);
  std::uniform_int_distribution<int> nint(0, 6);
  std::uniform_real_distribution<double> u(0.02, 0.98);
  std::uniform_int_distribution<int> mult(1, p);
  std::vector<double> U(p + 1, 0.0);
  std::vector<double> inner;
  const int m = nint(rng);
  for (int i = 0; i < m; ++i) inner.push_back(u(rng));
  std::sort(inner.begin(), inner.end());
  for (double t : inner) {
    if (!U.empty() && t - U.back() < 0.01) continue;
    const int k = mult(rng);
    for (int j = 0; j < k; ++j) U.push_back(t);
  }
  for (int j = 0; j <= p; ++j) U.push_back(1.0);
  return KnotVector(p, U);
}

double basis_value(const KnotVector& kv, int i, double t, int deriv = 0) {
  const auto b = eval_basis(kv, t, deriv);
  const int j = i - b.first();
  return (j < 0 || j > kv.degree()) ? 0.0 : b(deriv, j);
}

}  // namespace

TEST(KnotVectorTest, RejectsNonOpenAndExcessMultiplicity) {
  EXPECT_THROW(KnotVector(2, {0, 0, 0.5, 1, 1, 1}), PreconditionError);
  EXPECT_THROW(KnotVector(2, {0, 0, 0, 0.5, 0.5, 0.5, 1, 1, 1}), PreconditionError);
  EXPECT_THROW(KnotVector(1, {0, 0, 0.7, 0.3, 1, 1}), PreconditionError);
  EXPECT_NO_THROW(KnotVector(2, {0, 0, 0, 0.5, 0.5, 1, 1, 1}));
}

TEST(KnotVectorTest, RescalesAndSnaps) {
  const KnotVector kv(2, {2, 2, 2, 3, 3 + 1e-14, 4, 4, 4});
  EXPECT_EQ(kv.knots(), (std::vector<double>{0, 0, 0, 0.5, 0.5, 1, 1, 1}));
  EXPECT_EQ(kv.multiplicities(), (std::vector<int>{3, 2, 3}));
  EXPECT_EQ(kv.num_elements(), 2);
  EXPECT_EQ(kv.size(), 5);
  EXPECT_EQ(kv.continuity(1), 0);
}

TEST(FindSpanTest, SpecExamples) {
  const KnotVector kv(2, {0, 0, 0, 0.5, 1, 1, 1});
  EXPECT_EQ(find_span(kv, 0.25), 2);
  EXPECT_EQ(find_span(kv, 1.0), 3);
  EXPECT_THROW(find_span(kv, -0.1), DomainError);
  EXPECT_THROW(find_span(kv, 1.1), DomainError);
}

TEST(FindSpanTest, MatchesLinearScan) {
  const KnotVector kv = KnotVector::uniform(3, 9);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto& U = kv.knots();
  for (int s = 0; s < 200; ++s) {
    const double t = s == 0 ? 0.37 : u(rng);
    int expected = -1;
    for (std::size_t i = 0; i + 1 < U.size(); ++i)
      if (U[i] <= t && t < U[i + 1]) expected = static_cast<int>(i);
    EXPECT_EQ(find_span(kv, t), expected) << "t=" << t;
  }
}

TEST(EvalBasisTest, LinearHats) {
  const auto b = eval_basis(KnotVector(1, {0, 0, 1, 1}), 0.3, 0);
  EXPECT_NEAR(b(0, 0), 0.7, 1e-15);
  EXPECT_NEAR(b(0, 1), 0.3, 1e-15);
}

TEST(EvalBasisTest, BernsteinAtHalf) {
  const auto b = eval_basis(KnotVector(2, {0, 0, 0, 1, 1, 1}), 0.5, 0);
  EXPECT_NEAR(b(0, 0), 0.25, 1e-15);
  EXPECT_NEAR(b(0, 1), 0.5, 1e-15);
  EXPECT_NEAR(b(0, 2), 0.25, 1e-15);
}

TEST(EvalBasisTest, QuadraticClosedForm) {
  // B-splines of {0,0,0,.5,1,1,1} on the first span
  const KnotVector kv(2, {0, 0, 0, 0.5, 1, 1, 1});
  for (double t : {0.05, 0.2, 0.45}) {
    EXPECT_NEAR(basis_value(kv, 0, t), (1 - 2 * t) * (1 - 2 * t), 1e-14);
    EXPECT_NEAR(basis_value(kv, 1, t), 4 * t - 6 * t * t, 1e-14);
    EXPECT_NEAR(basis_value(kv, 2, t), 2 * t * t, 1e-14);
  }
}

TEST(EvalBasisTest, PartitionOfUnityAndNonnegativity) {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int s = 0; s < 1000; ++s) {
    const KnotVector kv = random_kv(rng);
    const double t = u(rng);
    const auto b = eval_basis(kv, t, std::min(2, kv.degree()));
    double sum = 0.0;
    for (int j = 0; j <= kv.degree(); ++j) {
      EXPECT_GE(b(0, j), 0.0);
      sum += b(0, j);
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    for (int k = 1; k <= std::min(2, kv.degree()); ++k) {
      double ds = 0.0;
      for (int j = 0; j <= kv.degree(); ++j) ds += b(k, j);
      EXPECT_NEAR(ds, 0.0, 1e-9 * (1.0 + std::abs(b(k, 0))));
    }
  }
}

TEST(EvalBasisTest, DerivativesMatchFiniteDifferences) {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  const double step = 1e-6;
  for (int s = 0; s < 200; ++s) {
    const KnotVector kv = random_kv(rng);
    double t = u(rng);
    // keep the stencil inside one span
    const auto& Z = kv.breakpoints();
    bool near_break = false;
    for (double z : Z) near_break |= std::abs(z - t) < 2 * step;
    if (near_break) continue;
    for (int i = 0; i < kv.size(); ++i) {
      const double fd = (basis_value(kv, i, t + step) - basis_value(kv, i, t - step)) / (2 * step);
      EXPECT_NEAR(basis_value(kv, i, t, 1), fd, 1e-5 * (1.0 + std::abs(fd)));
    }
  }
}

TEST(EvalBasisTest, DerivativesBeyondDegreeAreZero) {
  const auto b = eval_basis(KnotVector::uniform(2, 3), 0.4, 4);
  for (int k = 3; k <= 4; ++k)
    for (int j = 0; j <= 2; ++j) EXPECT_EQ(b(k, j), 0.0);
}

TEST(EvalBasisTest, LocalSupport) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int s = 0; s < 100; ++s) {
    const KnotVector kv = random_kv(rng);
    const auto& U = kv.knots();
    const int p = kv.degree();
    const double t = u(rng);
    for (int i = 0; i < kv.size(); ++i) {
      if (t < U[i] || t > U[i + p + 1]) {
        EXPECT_EQ(basis_value(kv, i, t), 0.0);
      }
    }
  }
}

TEST(EvalBasisTest, DerivativeIsSplineOfLowerDegree) {
  // (sum c_i B_i^p)' = sum p (c_i - c_{i-1}) / (xi_{i+p} - xi_i) B_i^{p-1} on the trimmed vector
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0), c(-1.0, 1.0);
  for (int s = 0; s < 50; ++s) {
    const KnotVector kv = random_kv(rng);
    const int p = kv.degree(), n = kv.size();
    const auto& U = kv.knots();
    std::vector<double> coef(n);
    for (double& v : coef) v = c(rng);
    const KnotVector low(p - 1, std::vector<double>(U.begin() + 1, U.end() - 1), true);
    std::vector<double> dcoef(n - 1);
    for (int i = 1; i < n; ++i) dcoef[i - 1] = p * (coef[i] - coef[i - 1]) / (U[i + p] - U[i]);
    for (int k = 0; k < 10; ++k) {
      const double t = u(rng);
      const double direct = eval_spline<double>(kv, coef, t, 1);
      const double viaLow = eval_spline<double>(low, dcoef, t, 0);
      EXPECT_NEAR(direct, viaLow, 1e-11 * (1.0 + std::abs(direct)));
    }
  }
}

TEST(InsertKnotTest, BoehmExample) {
  const KnotVector kv(2, {0, 0, 0, 1, 1, 1});
  const std::vector<double> c{1, 0, 0};
  auto [kv2, c2] = insert_knot<double>(kv, c, 0.5);
  EXPECT_EQ(kv2.knots(), (std::vector<double>{0, 0, 0, 0.5, 1, 1, 1}));
  ASSERT_EQ(c2.size(), 4u);
  EXPECT_NEAR(c2[0], 1.0, 1e-15);
  EXPECT_NEAR(c2[1], 0.5, 1e-15);
  EXPECT_NEAR(c2[2], 0.0, 1e-15);
  EXPECT_NEAR(c2[3], 0.0, 1e-15);
}

TEST(InsertKnotTest, PreservesTheSpline) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0), c(-2.0, 2.0);
  for (int s = 0; s < 30; ++s) {
    KnotVector kv = random_kv(rng);
    std::vector<double> coef(kv.size());
    for (double& v : coef) v = c(rng);
    double t = u(rng);
    int count = 0;
    for (double k : kv.knots()) count += std::abs(k - t) < 1e-12;
    if (count >= kv.degree() || t <= 0.0 || t >= 1.0) continue;
    auto [kv2, c2] = insert_knot<double>(kv, coef, t);
    for (int k = 0; k < 50; ++k) {
      const double x = u(rng);
      EXPECT_NEAR(eval_spline<double>(kv, coef, x), eval_spline<double>(kv2, c2, x), 1e-12);
    }
  }
}

TEST(InsertKnotTest, RepeatedInsertionStaysContinuous) {
  const int p = 3;
  KnotVector kv = KnotVector::uniform(p, 2);
  std::vector<double> coef{0.3, -1.0, 2.0, 0.5, 1.5};
  const double t = 0.3;
  for (int k = 0; k < p; ++k) std::tie(kv, coef) = insert_knot<double>(kv, coef, t);
  EXPECT_EQ(kv.multiplicities()[1], p);
  EXPECT_NEAR(eval_spline<double>(kv, coef, t - 1e-13), eval_spline<double>(kv, coef, t + 1e-13), 1e-10);
  EXPECT_THROW(insert_knot<double>(kv, coef, t), PreconditionError);
  EXPECT_THROW(insert_knot<double>(kv, coef, 0.0), DomainError);
}

TEST(UniformRefineTest, Examples) {
  EXPECT_EQ(uniform_refine(KnotVector(1, {0, 0, 1, 1}), 1).knots(), (std::vector<double>{0, 0, 0.5, 1, 1}));
  const auto r = uniform_refine(KnotVector(2, {0, 0, 0, 1, 1, 1}), 2);
  EXPECT_EQ(r.breakpoints(), (std::vector<double>{0, 0.25, 0.5, 0.75, 1}));
  std::mt19937 rng(6);
  for (int s = 0; s < 20; ++s) {
    const KnotVector kv = random_kv(rng);
    const auto r1 = uniform_refine(kv, 1);
    EXPECT_EQ(r1.num_elements(), 2 * kv.num_elements());
    EXPECT_NEAR(r1.quasi_uniformity(), kv.quasi_uniformity(), 1e-12);
  }
  EXPECT_THROW(uniform_refine(KnotVector::uniform(1, 1), -1), PreconditionError);
}

TEST(TrimKnotVectorTest, Examples) {
  const KnotVector kv(2, {0, 0, 0, 0.5, 1, 1, 1});
  const auto t1 = trim_knot_vector(kv, 1);
  EXPECT_EQ(t1.degree(), 1);
  EXPECT_EQ(t1.knots(), (std::vector<double>{0, 0, 0.5, 1, 1}));
  const auto t2 = trim_knot_vector(kv, 2);
  EXPECT_EQ(t2.degree(), 0);
  EXPECT_EQ(t2.knots(), (std::vector<double>{0, 0.5, 1}));
  EXPECT_EQ(t2.size(), kv.size() - 2);
  EXPECT_THROW(trim_knot_vector(KnotVector(2, {0, 0, 0, 0.5, 0.5, 1, 1, 1}), 2), PreconditionError);
  EXPECT_THROW(trim_knot_vector(KnotVector::uniform(1, 2), 2), PreconditionError);
}

TEST(QuadratureTest, ExactForMonomials) {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int q = 1; q <= 12; ++q) {
    const QuadratureRule rule(q);
    for (double w : rule.weights()) EXPECT_GT(w, 0.0);
    const double a = u(rng), b = a + 0.1 + std::abs(u(rng));
    for (int k = 0; k <= 2 * q - 1; ++k) {
      const double exact = (std::pow(b, k + 1) - std::pow(a, k + 1)) / (k + 1);
      const double got = rule.integrate([k](double x) { return std::pow(x, k); }, a, b);
      EXPECT_NEAR(got, exact, 1e-13 * std::max(1.0, std::abs(exact))) << "q=" << q << " k=" << k;
    }
  }
  EXPECT_THROW(QuadratureRule(0), PreconditionError);
}
