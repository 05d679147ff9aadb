#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "igamortar/assembly.hpp"
#include "igamortar/benchmarks.hpp"
#include "igamortar/manufactured.hpp"

namespace igamortar {

enum class ProblemKind { Scalar, Elasticity };

/// A benchmark problem with closed-form solution. The domain may depend on the level
/// (geometry approximated per mesh); refine(level) gives the uniform bisection count.
struct ManufacturedCase {
  std::string name;
  ProblemKind kind = ProblemKind::Scalar;
  std::function<MultipatchDomain(int level)> domain;
  std::function<int(int level)> refine = [](int level) { return level; };
  std::vector<int> extra_refine;
  ScalarExact scalar;
  ElasticExact elastic;
};

struct ErrorRow {
  int level = 0;
  double h = 0.0;
  double l2 = 0.0;
  double broken_v = 0.0;
  std::vector<double> dual;          // per interface
  std::vector<double> l2_patch;      // per subdomain
  std::vector<double> broken_v_patch;
  int unknowns = 0;
  double constraint_residual = 0.0;  // ||B u||_inf / ||u||_inf
  double seconds = 0.0;
};

struct ErrorReport {
  std::string case_name;
  std::string pairing;
  int degree = 0;
  std::vector<ErrorRow> rows;
};

/// Pairwise rates log(e_i / e_{i+1}) / log(h_i / h_{i+1}); NaN where an error is <= 1e-14.
inline std::vector<double> pairwise_slopes(const std::vector<double>& e, const std::vector<double>& h) {
  std::vector<double> s;
  for (std::size_t i = 0; i + 1 < e.size(); ++i) {
    if (e[i] <= 1e-14 || e[i + 1] <= 1e-14)
      s.push_back(std::nan(""));
    else
      s.push_back(std::log(e[i] / e[i + 1]) / std::log(h[i] / h[i + 1]));
  }
  return s;
}

/// Least-squares slope of log e against log h over the last `last` levels.
inline double ls_slope(const std::vector<double>& e, const std::vector<double>& h, int last = 3) {
  const int n = static_cast<int>(e.size());
  if (n < 2) throw PreconditionError("slope fit needs at least two levels");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int i = std::max(0, n - last); i < n; ++i) {
    if (e[i] <= 1e-14) continue;
    const double x = std::log(h[i]), y = std::log(e[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) return std::nan("");
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

/// Slopes of the errors of successive uniform bisections: pairwise log2 ratios.
inline std::vector<double> slope_fit(const std::vector<double>& e) {
  std::vector<double> h(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) h[i] = std::ldexp(1.0, -static_cast<int>(i));
  return pairwise_slopes(e, h);
}

/// Errors of a solved discretization: L2 and broken H1 over the patches with q = p+2
/// Gauss points per direction (or q_override), interface L2 error of the multiplier
/// against the slave-side normal flux alpha grad u . n (stress times n for elasticity).
inline ErrorRow error_norms(const Discretization& d, const Solution& sol, const ManufacturedCase& mc,
                            int q_override = -1) {
  ErrorRow row;
  const int nc = d.dofs.components;
  const int q = q_override > 0 ? q_override : d.options.degree + 2;
  double l2 = 0.0, h1 = 0.0;
  for (int k = 0; k < d.domain.num_patches(); ++k) {
    const auto& S = d.spaces[k];
    double pl2 = 0.0, ph1 = 0.0;
    for_each_element(d.domain.patches[k], S, q, [&](const ElementData& ed) {
      for (int qp = 0; qp < ed.nq; ++qp) {
        const Vec2& x = ed.x[qp];
        for (int c = 0; c < nc; ++c) {
          double uh = 0.0;
          Vec2 gh{0.0, 0.0};
          for (int a = 0; a < ed.nloc; ++a) {
            const double coef = sol.u[d.dofs.primal(k, c, ed.dofs[a])];
            uh += coef * ed.value(qp, a);
            gh = gh + coef * ed.grad(qp, a);
          }
          double ue;
          Vec2 ge;
          if (mc.kind == ProblemKind::Scalar) {
            ue = mc.scalar.u(x);
            ge = mc.scalar.grad(x);
          } else {
            ue = mc.elastic.u(x)[c];
            ge = mc.elastic.grad(x)[c];
          }
          const Vec2 dg = ge - gh;
          pl2 += ed.w[qp] * (ue - uh) * (ue - uh);
          ph1 += ed.w[qp] * ((ue - uh) * (ue - uh) + dot(dg, dg));
        }
      }
    });
    row.l2_patch.push_back(std::sqrt(pl2));
    row.broken_v_patch.push_back(std::sqrt(ph1));
    l2 += pl2;
    h1 += ph1;
  }
  row.l2 = std::sqrt(l2);
  row.broken_v = std::sqrt(h1);
  for (int l = 0; l < d.domain.num_interfaces(); ++l) {
    const auto& g = d.domain.interfaces[l];
    const auto& ms = d.multipliers[l];
    const auto& kv = d.spaces[g.slave].face_knots(g.slave_face);
    double err = 0.0;
    for_each_face_point(d.domain.patches[g.slave], g.slave_face, kv, q, [&](const FacePoint& fp) {
      const auto mv = ms.eval(fp.t);
      for (int c = 0; c < nc; ++c) {
        double lh = 0.0;
        for (auto [j, v] : mv) lh += v * sol.lambda[d.dofs.mult_offset[l] + c * ms.size() + j];
        double ex;
        if (mc.kind == ProblemKind::Scalar)
          ex = d.domain.coeffs(g.slave).alpha(fp.x) * dot(mc.scalar.grad(fp.x), fp.normal);
        else
          ex = (mc.elastic.stress(fp.x) * fp.normal)[c];
        err += fp.w * (ex - lh) * (ex - lh);
      }
    });
    row.dual.push_back(std::sqrt(err));
  }
  row.h = d.mesh_size();
  row.unknowns = d.dofs.num_primal + d.dofs.num_multipliers;
  const double un = max_abs(sol.u);
  row.constraint_residual = un > 0.0 ? sol.constraint_residual / un : sol.constraint_residual;
  return row;
}

inline ScalarData scalar_data(const ScalarExact& e) {
  ScalarData s;
  s.source = e.source;
  s.dirichlet = e.u;
  s.neumann = [g = e.grad](const Vec2& x, const Vec2& n) { return dot(g(x), n); };
  return s;
}

inline ElasticData elastic_data(const ElasticExact& e) {
  ElasticData s;
  s.body_force = e.body_force;
  s.dirichlet = e.u;
  s.traction = [st = e.stress](const Vec2& x, const Vec2& n) { return st(x) * n; };
  return s;
}

struct LevelResult {
  Discretization disc;
  Solution solution;
  ErrorRow errors;
};

/// Discretizes, assembles, solves and measures one level of a case.
inline LevelResult solve_level(const ManufacturedCase& mc, Pairing pairing, int degree, int level) {
  const auto t0 = std::chrono::steady_clock::now();
  DiscretizationOptions opt;
  opt.degree = degree;
  opt.refine = mc.refine(level);
  opt.extra_refine = mc.extra_refine;
  opt.pairing = pairing;
  opt.components = mc.kind == ProblemKind::Scalar ? 1 : 2;
  LevelResult r{discretize(mc.domain(level), opt), {}, {}};
  const SaddleSystem sys = mc.kind == ProblemKind::Scalar ? assemble_system(r.disc, scalar_data(mc.scalar))
                                                          : assemble_system(r.disc, elastic_data(mc.elastic));
  r.solution = solve_saddle(sys);
  r.errors = error_norms(r.disc, r.solution, mc);
  r.errors.level = level;
  r.errors.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline ErrorReport run_convergence(const ManufacturedCase& mc, Pairing pairing, int degree, int levels) {
  ErrorReport rep;
  rep.case_name = mc.name;
  rep.pairing = pairing.token();
  rep.degree = degree;
  for (int l = 0; l < levels; ++l) rep.rows.push_back(solve_level(mc, pairing, degree, l).errors);
  return rep;
}

inline std::vector<double> column(const ErrorReport& r, double ErrorRow::*field) {
  std::vector<double> v;
  for (const auto& row : r.rows) v.push_back(row.*field);
  return v;
}

// ---- benchmark cases -------------------------------------------------------------

/// sin(pi x) sin(pi y) on the two-patch quarter annulus. The geometry is bisected
/// `angular` times along the arcs before uniform refinement starts at `base`. The
/// non-matching variant refines the master (outer) patch once more.
inline ManufacturedCase annulus_case(bool nonmatching = false, int base = 1, int angular = 2) {
  ManufacturedCase mc;
  mc.name = nonmatching ? "annulus-nonmatching" : "annulus";
  mc.domain = [angular](int) {
    auto d = annulus_domain();
    for (auto& p : d.patches) p = refine_patch(p, 1, angular);
    return d;
  };
  mc.refine = [base](int level) { return level + base; };
  if (nonmatching) mc.extra_refine = {0, 1};
  mc.scalar = sine_product(std::numbers::pi, std::numbers::pi);
  return mc;
}

/// r^{2/3} sin(2 phi / 3) on the three-patch L-shape; patch 2 is refined once more.
inline ManufacturedCase corner_case(int base = 1) {
  ManufacturedCase mc;
  mc.name = "corner";
  mc.domain = [](int) { return corner_domain(); };
  mc.refine = [base](int level) { return level + base; };
  mc.extra_refine = {0, 0, 1};
  mc.scalar = corner_singularity();
  return mc;
}

/// Kirsch solution on the two-patch plate with a hole, plane strain, radially graded
/// towards the hole.
inline ManufacturedCase plate_case(int base = 3, double grading = 0.2, double E = 1e5, double nu = 0.3,
                                   double T = 10.0) {
  ManufacturedCase mc;
  mc.name = "plate";
  mc.kind = ProblemKind::Elasticity;
  const double lam = lame_lambda(E, nu), mu = lame_mu(E, nu);
  mc.domain = [lam, mu, grading](int) { return plate_with_hole_domain(0.2, 2.0, lam, mu, grading); };
  mc.refine = [base](int level) { return level + base; };
  mc.elastic = kirsch(0.2, T, E, nu);
  return mc;
}

/// sin(6x) sin(5y) on the unit square split along y = 0.5 + 0.05 sin(2 pi x) (curved) or
/// y = 0.5 (straight). Slave and master columns are 2 and 3 elements per 2^level; each
/// side interpolates the curve on its own mesh, so the curved split has an interface gap.
inline ManufacturedCase split_square_case(bool curved, int degree = 3, int base = 1) {
  ManufacturedCase mc;
  mc.name = curved ? "split-curved" : "split-straight";
  mc.domain = [curved, degree, base](int level) {
    const int s = 1 << (level + base);
    std::function<double(double)> c = [](double) { return 0.5; };
    if (curved) c = [](double x) { return 0.5 + 0.05 * std::sin(2.0 * std::numbers::pi * x); };
    return split_square_domain(degree, 2 * s, 3 * s, 2 * s, c);
  };
  mc.refine = [](int) { return 0; };
  mc.scalar = sine_product(6.0, 5.0);
  return mc;
}

/// Rates a study is expected to show. NaN marks no expectation; with `lower_bound` the
/// rates are guaranteed minima rather than targets.
struct ExpectedRates {
  double l2 = std::nan("");
  double broken_v = std::nan("");
  bool lower_bound = false;
};

inline ExpectedRates expected_rates(const std::string& case_name, Pairing pairing, int degree) {
  ExpectedRates r;
  const bool equal = pairing.variant == MultiplierVariant::EqualOrderModified;
  if (!equal && pairing.drop != 2) return r;
  if (case_name == "corner") {
    r.broken_v = 2.0 / 3.0;
    return r;
  }
  if (equal) {
    r.l2 = degree + 1.0;
    r.broken_v = degree;
  } else {
    r.l2 = degree + 0.5;
    r.broken_v = degree - 0.5;
    r.lower_bound = true;
  }
  return r;
}

inline const std::vector<std::string>& builtin_case_names() {
  static const std::vector<std::string> names{"annulus",      "annulus-nonmatching", "corner",
                                              "plate",        "split-curved",        "split-straight"};
  return names;
}

/// Benchmark case by name with its default initial mesh; `degree` only affects the
/// split-square geometry.
inline ManufacturedCase builtin_case(const std::string& name, int degree = 3) {
  if (name == "annulus") return annulus_case(false);
  if (name == "annulus-nonmatching") return annulus_case(true);
  if (name == "corner") return corner_case();
  if (name == "plate") return plate_case();
  if (name == "split-curved") return split_square_case(true, degree);
  if (name == "split-straight") return split_square_case(false, degree);
  throw InputError("unknown case '" + name + "'");
}

}  // namespace igamortar
