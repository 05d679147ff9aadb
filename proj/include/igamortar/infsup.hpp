#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "igamortar/dense.hpp"
#include "igamortar/quadrature.hpp"
#include "igamortar/spaces.hpp"

namespace igamortar {

enum class Measure { Parametric, Physical };

/// L2 products on one interface: G (multiplier x trace), S (multiplier), T (trace).
struct GramTriple {
  DenseMatrix G;
  DenseMatrix S;
  DenseMatrix T;
  int interface = -1;
  Measure measure = Measure::Parametric;
};

/// Face of a patch that carries the physical measure.
struct FaceRef {
  const NurbsPatch* patch = nullptr;
  Face face = Face::South;
};

inline GramTriple build_grams(const TraceSpace& trace, const MultiplierSpace& mult,
                              Measure measure = Measure::Parametric,
                              std::optional<FaceRef> where = std::nullopt) {
  if (measure == Measure::Physical && (!where || !where->patch))
    throw PreconditionError("physical measure needs the slave face geometry");
  const int nt = trace.size();
  const int nm = mult.size();
  GramTriple g;
  g.G = DenseMatrix(nm, nt);
  g.S = DenseMatrix(nm, nm);
  g.T = DenseMatrix(nt, nt);
  g.interface = trace.interface;
  g.measure = measure;
  std::vector<int> pos(trace.kv.size(), -1);
  for (int i = 0; i < nt; ++i) pos[trace.active[i]] = i;
  const QuadratureRule rule(trace.kv.degree() + 2);
  // union of breakpoints of both spaces
  std::vector<double> Z = trace.kv.breakpoints();
  Z.insert(Z.end(), mult.base.breakpoints().begin(), mult.base.breakpoints().end());
  std::sort(Z.begin(), Z.end());
  Z.erase(std::unique(Z.begin(), Z.end()), Z.end());
  for (std::size_t e = 0; e + 1 < Z.size(); ++e) {
    for (int qi = 0; qi < rule.order(); ++qi) {
      const double t = rule.node(qi, Z[e], Z[e + 1]);
      double w = rule.weight(qi, Z[e], Z[e + 1]);
      if (measure == Measure::Physical) w *= edge_measure(*where->patch, where->face, t);
      const auto bt = eval_basis(trace.kv, t, 0);
      std::vector<std::pair<int, double>> tv;
      for (int a = 0; a <= trace.kv.degree(); ++a) {
        const int i = pos[bt.first() + a];
        if (i >= 0 && bt(0, a) != 0.0) tv.emplace_back(i, bt(0, a));
      }
      const auto mv = mult.eval(t);
      for (auto [i, vi] : tv)
        for (auto [k, vk] : tv) g.T(i, k) += w * vi * vk;
      for (auto [j, vj] : mv) {
        for (auto [k, vk] : mv) g.S(j, k) += w * vj * vk;
        for (auto [i, vi] : tv) g.G(j, i) += w * vj * vi;
      }
    }
  }
  return g;
}

namespace detail {

/// G T^{-1} G^T, symmetrized.
inline DenseMatrix schur_form(const GramTriple& g) {
  const DenseMatrix L = cholesky(g.T);
  const int nm = g.G.rows(), nt = g.G.cols();
  DenseMatrix Y(nt, nm);  // L^{-1} G^T
  for (int j = 0; j < nm; ++j) {
    std::vector<double> col(nt);
    for (int i = 0; i < nt; ++i) col[i] = g.G(j, i);
    forward_subst(L, col);
    for (int i = 0; i < nt; ++i) Y(i, j) = col[i];
  }
  DenseMatrix K(nm, nm);
  for (int a = 0; a < nm; ++a)
    for (int b = a; b < nm; ++b) {
      double s = 0.0;
      for (int i = 0; i < nt; ++i) s += Y(i, a) * Y(i, b);
      K(a, b) = K(b, a) = s;
    }
  return K;
}

}  // namespace detail

/// Square root of the smallest eigenvalue of G T^{-1} G^T x = lambda S x.
inline double infsup_constant(const GramTriple& g) {
  const auto r = gen_eig_sym(detail::schur_form(g), g.S);
  return std::sqrt(std::max(0.0, r.values.front()));
}

/// All generalized eigenvalues (ascending) of the inf-sup problem.
inline EigenResult infsup_spectrum(const GramTriple& g) {
  return gen_eig_sym(detail::schur_form(g), g.S);
}

/// sup_w (mu^T G w) / (|w|_T |mu|_S) in closed form.
inline double sup_ratio(const GramTriple& g, const std::vector<double>& mu) {
  const int nm = g.G.rows();
  if (static_cast<int>(mu.size()) != nm) throw PreconditionError("multiplier vector length mismatch");
  if (max_abs(mu) == 0.0) throw PreconditionError("sup ratio of the zero multiplier");
  const DenseMatrix L = cholesky(g.T);
  std::vector<double> r(g.G.cols(), 0.0);  // G^T mu
  for (int j = 0; j < nm; ++j)
    for (int i = 0; i < g.G.cols(); ++i) r[i] += g.G(j, i) * mu[j];
  forward_subst(L, r);
  const double num = dot(r, r);
  const double den = dot(mu, g.S * mu);
  return std::sqrt(num / den);
}

enum class BcMode { None, Dirichlet };

struct SweepConfig {
  std::vector<int> degrees{2};
  std::vector<std::string> variants{"equal-modified"};
  int levels = 5;
  int base = 2;  // level l uses 2^(l + base) elements
  BcMode bc = BcMode::None;
};

struct SweepRow {
  int degree;
  std::string variant;
  int level;
  double h;
  double constant;
};

/// Univariate trace/multiplier pair on a uniform maximally smooth knot vector.
inline GramTriple interval_grams(int degree, int elements, Pairing pairing, BcMode bc) {
  const KnotVector kv = KnotVector::uniform(degree, elements);
  const TraceSpace trace = build_trace_space(kv, bc == BcMode::Dirichlet);
  const bool mod = pairing.variant == MultiplierVariant::EqualOrderModified;
  const MultiplierSpace mult = build_multiplier_space(kv, pairing, mod, mod);
  return build_grams(trace, mult);
}

inline std::vector<SweepRow> sweep(const SweepConfig& cfg) {
  std::vector<SweepRow> rows;
  for (int p : cfg.degrees)
    for (const auto& v : cfg.variants) {
      const Pairing pairing = parse_pairing(v);
      for (int l = 0; l < cfg.levels; ++l) {
        const int E = 1 << (l + cfg.base);
        const auto g = interval_grams(p, E, pairing, cfg.bc);
        rows.push_back({p, pairing.token(), l, 1.0 / E, infsup_constant(g)});
      }
    }
  return rows;
}

struct CheckerboardRow {
  int level;
  double h;
  double ratio;
};

/// Sup ratio of the checkerboard mode of the pm1 space on 2^(l + base) elements.
inline std::vector<CheckerboardRow> checkerboard_study(int degree, int levels, int base = 5,
                                                       BcMode bc = BcMode::Dirichlet) {
  if (degree < 2) throw PreconditionError("checkerboard mode needs degree >= 2");
  std::vector<CheckerboardRow> rows;
  for (int l = 0; l < levels; ++l) {
    const int E = 1 << (l + base);
    const KnotVector kv = KnotVector::uniform(degree, E);
    const MultiplierSpace mult = build_multiplier_space(kv, Pairing{MultiplierVariant::DegreeMinusOne, 1}, false, false);
    const auto g = build_grams(build_trace_space(kv, bc == BcMode::Dirichlet), mult);
    rows.push_back({l, 1.0 / E, sup_ratio(g, checkerboard_mode(mult))});
  }
  return rows;
}

}  // namespace igamortar
