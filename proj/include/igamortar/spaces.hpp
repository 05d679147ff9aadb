#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "igamortar/multipatch.hpp"

namespace igamortar {

/// Tensor-product B-spline space on one patch. Flat dof id = i1 * n2 + i2.
class SplineSpace {
 public:
  SplineSpace() = default;
  SplineSpace(KnotVector k1, KnotVector k2) : kv_{std::move(k1), std::move(k2)} {}

  /// Degree-p space on the breakpoints of the patch geometry, continuity
  /// min(p-1, geometric continuity) at each breakpoint, then `refine` bisections.
  static SplineSpace on_patch(const NurbsPatch& patch, int degree, int refine) {
    std::array<KnotVector, 2> kv;
    for (int d = 0; d < 2; ++d) {
      const auto& g = patch.knots(d);
      const auto& Z = g.breakpoints();
      std::vector<int> mult;
      for (std::size_t j = 1; j + 1 < Z.size(); ++j) {
        const int cont = std::min(degree - 1, g.degree() - g.multiplicities()[j]);
        mult.push_back(std::max(1, degree - cont));
      }
      kv[d] = uniform_refine(KnotVector::from_breakpoints(degree, Z, mult), refine);
    }
    return SplineSpace(kv[0], kv[1]);
  }

  const KnotVector& knots(int dir) const { return kv_[dir]; }
  int size(int dir) const { return kv_[dir].size(); }
  int dim() const { return kv_[0].size() * kv_[1].size(); }
  int degree(int dir = 0) const { return kv_[dir].degree(); }
  int index(int i1, int i2) const { return i1 * kv_[1].size() + i2; }
  std::array<int, 2> multi_index(int flat) const { return {flat / kv_[1].size(), flat % kv_[1].size()}; }

  /// Volume dof ids of the functions that do not vanish on a face, in face order.
  std::vector<int> face_dofs(Face face) const {
    const int n1 = size(0), n2 = size(1);
    std::vector<int> out;
    switch (face) {
      case Face::South: for (int i = 0; i < n1; ++i) out.push_back(index(i, 0)); break;
      case Face::North: for (int i = 0; i < n1; ++i) out.push_back(index(i, n2 - 1)); break;
      case Face::West: for (int i = 0; i < n2; ++i) out.push_back(index(0, i)); break;
      case Face::East: for (int i = 0; i < n2; ++i) out.push_back(index(n1 - 1, i)); break;
    }
    return out;
  }

  const KnotVector& face_knots(Face face) const { return kv_[face_direction(face)]; }

  /// Largest parametric element size over both directions.
  double mesh_size() const { return std::max(kv_[0].max_element_size(), kv_[1].max_element_size()); }

 private:
  std::array<KnotVector, 2> kv_;
};

/// Slave-side trace space of an interface, optionally with zero end conditions.
struct TraceSpace {
  int interface = -1;
  KnotVector kv;
  bool edge_zero = false;
  std::vector<int> active;       // univariate indices kept
  std::vector<int> volume_dofs;  // slave-patch dof of each kept function

  int size() const { return static_cast<int>(active.size()); }
};

inline TraceSpace build_trace_space(const SplineSpace& slave, Face face, bool edge_zero,
                                    int interface = -1) {
  TraceSpace t;
  t.interface = interface;
  t.kv = slave.face_knots(face);
  t.edge_zero = edge_zero;
  const auto dofs = slave.face_dofs(face);
  const int n = t.kv.size();
  for (int i = edge_zero ? 1 : 0; i < (edge_zero ? n - 1 : n); ++i) {
    t.active.push_back(i);
    t.volume_dofs.push_back(dofs[i]);
  }
  return t;
}

/// Univariate trace space on a bare knot vector (no patch attached).
inline TraceSpace build_trace_space(const KnotVector& kv, bool edge_zero) {
  TraceSpace t;
  t.kv = kv;
  t.edge_zero = edge_zero;
  const int n = kv.size();
  for (int i = edge_zero ? 1 : 0; i < (edge_zero ? n - 1 : n); ++i) {
    t.active.push_back(i);
    t.volume_dofs.push_back(i);
  }
  return t;
}

enum class MultiplierVariant { EqualOrderModified, DegreeMinusOne, DegreeMinusTwo, DegreeMinusK };

/// Parsed pairing token: "equal-modified" (alias "equal"), "pm1", "pm2", or "pmK".
struct Pairing {
  MultiplierVariant variant = MultiplierVariant::EqualOrderModified;
  int drop = 0;

  std::string token() const {
    if (variant == MultiplierVariant::EqualOrderModified) return "equal-modified";
    return "pm" + std::to_string(drop);
  }
};

inline Pairing parse_pairing(std::string_view s) {
  if (s == "equal-modified" || s == "equal") return {MultiplierVariant::EqualOrderModified, 0};
  if (s.size() > 2 && s.substr(0, 2) == "pm") {
    int k = 0;
    for (char c : s.substr(2)) {
      if (c < '0' || c > '9') throw InputError("bad pairing token '" + std::string(s) + "'");
      k = 10 * k + (c - '0');
    }
    if (k == 1) return {MultiplierVariant::DegreeMinusOne, 1};
    if (k == 2) return {MultiplierVariant::DegreeMinusTwo, 2};
    if (k >= 3) return {MultiplierVariant::DegreeMinusK, k};
  }
  throw InputError("unknown pairing '" + std::string(s) + "' (equal-modified|pm1|pm2|pmK)");
}

/// Coefficients c_i such that B_i + c_i B_end has vanishing p-th derivative on the end
/// element. Start: i = 2..p+1 against B_1; end: i = n-p..n-1 against B_n (1-based).
inline std::vector<double> boundary_modification_coeffs(const KnotVector& kv, bool at_end) {
  const int p = kv.degree();
  const int n = kv.size();
  if (p < 1) throw PreconditionError("boundary modification needs degree >= 1");
  if (kv.num_elements() < 2) throw PreconditionError("boundary modification needs >= 2 elements");
  const auto& Z = kv.breakpoints();
  const double mid = at_end ? 0.5 * (Z[Z.size() - 2] + Z.back()) : 0.5 * (Z[0] + Z[1]);
  const auto b = eval_basis(kv, mid, p);
  auto dp = [&](int i0) {  // p-th derivative of 0-based function i0
    const int j = i0 - b.first();
    return (j >= 0 && j <= p) ? b(p, j) : 0.0;
  };
  const int ref = at_end ? n - 1 : 0;
  const double denom = dp(ref);
  if (std::abs(denom) < 1e-300) throw PreconditionError("vanishing end-function derivative");
  std::vector<double> c;
  if (!at_end) {
    for (int i = 1; i <= p; ++i) c.push_back(-dp(i) / denom);
  } else {
    for (int i = n - 1 - p; i <= n - 2; ++i) c.push_back(-dp(i) / denom);
  }
  return c;
}

/// Lagrange multiplier space on a slave face: a base knot vector plus a sparse map from
/// base functions to multiplier functions.
class MultiplierSpace {
 public:
  MultiplierSpace() = default;

  int interface = -1;
  MultiplierVariant variant = MultiplierVariant::EqualOrderModified;
  int drop = 0;
  KnotVector base;
  bool modify_start = false;
  bool modify_end = false;
  std::vector<double> alpha;  // left modification, base functions 2..p+1
  std::vector<double> beta;   // right modification, base functions n-p..n-1

  int size() const { return dim_; }
  int degree() const { return base.degree(); }

  /// Base function i contributes columns[i] = {(j, c)} to multiplier functions j.
  const std::vector<std::vector<std::pair<int, double>>>& columns() const { return cols_; }

  /// Values of all multiplier functions that do not vanish at t, as (index, value).
  std::vector<std::pair<int, double>> eval(double t) const {
    const auto b = eval_basis(base, t, 0);
    std::vector<std::pair<int, double>> out;
    for (int a = 0; a <= base.degree(); ++a) {
      const double v = b(0, a);
      if (v == 0.0) continue;
      for (auto [j, c] : cols_[b.first() + a]) {
        auto it = std::find_if(out.begin(), out.end(), [j](const auto& e) { return e.first == j; });
        if (it == out.end())
          out.emplace_back(j, c * v);
        else
          it->second += c * v;
      }
    }
    return out;
  }

  /// Dense coefficient vector of the space element sum_j mu_j phi_j in the base basis.
  std::vector<double> to_base(const std::vector<double>& mu) const {
    std::vector<double> out(base.size(), 0.0);
    for (int i = 0; i < base.size(); ++i)
      for (auto [j, c] : cols_[i]) out[i] += c * mu[j];
    return out;
  }

  double evaluate(const std::vector<double>& mu, double t) const {
    double s = 0.0;
    for (auto [j, v] : eval(t)) s += v * mu[j];
    return s;
  }

  void finalize_identity() {
    const int n = base.size();
    cols_.assign(n, {});
    for (int i = 0; i < n; ++i) cols_[i].emplace_back(i, 1.0);
    dim_ = n;
  }

  void finalize_modified() {
    const int n = base.size();
    const int p = base.degree();
    const int first = modify_start ? 1 : 0;
    const int last = modify_end ? n - 2 : n - 1;
    cols_.assign(n, {});
    dim_ = last - first + 1;
    for (int i = first; i <= last; ++i) cols_[i].emplace_back(i - first, 1.0);
    if (modify_start) {
      for (int i = 1; i <= p; ++i) cols_[0].emplace_back(i - first, alpha[i - 1]);
    }
    if (modify_end) {
      for (int k = 0, i = n - 1 - p; i <= n - 2; ++i, ++k) cols_[n - 1].emplace_back(i - first, beta[k]);
    }
  }

 private:
  std::vector<std::vector<std::pair<int, double>>> cols_;
  int dim_ = 0;
};

inline MultiplierSpace build_multiplier_space(const KnotVector& trace_kv, Pairing pairing,
                                              bool modify_start, bool modify_end,
                                              int interface = -1) {
  MultiplierSpace m;
  m.interface = interface;
  m.variant = pairing.variant;
  m.drop = pairing.drop;
  if (pairing.variant == MultiplierVariant::EqualOrderModified) {
    m.base = trace_kv;
    m.modify_start = modify_start;
    m.modify_end = modify_end;
    if (modify_start || modify_end) {
      if (trace_kv.size() < trace_kv.degree() + 2 || trace_kv.num_elements() < 2)
        throw PreconditionError("boundary modification needs at least two elements on the face");
    }
    if (modify_start) m.alpha = boundary_modification_coeffs(trace_kv, false);
    if (modify_end) m.beta = boundary_modification_coeffs(trace_kv, true);
    m.finalize_modified();
    return m;
  }
  if (trace_kv.degree() < pairing.drop) {
    std::ostringstream os;
    os << "pairing " << pairing.token() << " needs primal degree >= " << pairing.drop;
    throw PreconditionError(os.str());
  }
  m.base = trim_knot_vector(trace_kv, pairing.drop);
  m.finalize_identity();
  return m;
}

/// Coefficients (-1)^i (i-1)(n-i), i = 1..n, of the oscillating mode of a p/p-1 space.
inline std::vector<double> checkerboard_mode(const MultiplierSpace& space) {
  if (space.variant != MultiplierVariant::DegreeMinusOne)
    throw PreconditionError("checkerboard mode is defined for the pm1 space only");
  const int n = space.size();
  std::vector<double> mu(n);
  for (int i = 1; i <= n; ++i) mu[i - 1] = ((i % 2 == 0) ? 1.0 : -1.0) * (i - 1) * double(n - i);
  return mu;
}

}  // namespace igamortar
