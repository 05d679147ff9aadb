#pragma once

// Univariate B-spline machinery on open knot vectors over [0,1]:
// span location, Cox-de Boor values and derivatives, Boehm knot insertion,
// uniform h-refinement and end-knot trimming.

#include <algorithm>
#include <cmath>
#include <span>
#include <sstream>
#include <utility>
#include <vector>

#include "igamortar/core.hpp"

namespace igamortar {

/// Knots closer than this are merged at ingestion so that multiplicities are discrete.
inline constexpr double kKnotSnapTolerance = 1e-12;

class KnotVector {
 public:
  KnotVector() = default;

  /// Builds an open knot vector of the given degree. Input knots are rescaled to
  /// [0,1] and near-duplicates are snapped together. Interior multiplicities may
  /// not exceed `degree` unless `allow_discontinuous` is set, in which case
  /// degree+1 is accepted (used for multiplier spaces obtained by trimming).
  KnotVector(int degree, std::vector<double> knots, bool allow_discontinuous = false)
      : degree_(degree), knots_(std::move(knots)) {
    if (degree_ < 0) throw PreconditionError("knot vector degree must be nonnegative");
    if (knots_.size() < static_cast<std::size_t>(2 * degree_ + 2))
      throw PreconditionError("knot vector too short for its degree");
    if (!std::is_sorted(knots_.begin(), knots_.end()))
      throw PreconditionError("knot vector must be nondecreasing");
    const double lo = knots_.front();
    const double hi = knots_.back();
    if (!(hi > lo)) throw PreconditionError("knot vector spans an empty interval");
    if (lo != 0.0 || hi != 1.0) {
      for (double& k : knots_) k = (k - lo) / (hi - lo);
    }
    for (std::size_t i = 1; i < knots_.size(); ++i) {
      if (knots_[i] - knots_[i - 1] < kKnotSnapTolerance) knots_[i] = knots_[i - 1];
    }
    for (double& k : knots_) {
      if (k < kKnotSnapTolerance) k = 0.0;
      if (1.0 - k < kKnotSnapTolerance) k = 1.0;
    }
    build_breakpoints();
    const int p = degree_;
    if (mults_.front() != p + 1 || mults_.back() != p + 1) {
      throw PreconditionError("knot vector is not open: end knots must repeat degree+1 times");
    }
    const int max_interior = (degree_ == 0 || allow_discontinuous) ? p + 1 : p;
    for (std::size_t j = 1; j + 1 < breaks_.size(); ++j) {
      if (mults_[j] > max_interior) {
        std::ostringstream os;
        os << "interior knot " << breaks_[j] << " has multiplicity " << mults_[j]
           << " exceeding " << max_interior;
        throw PreconditionError(os.str());
      }
    }
  }

  /// Uniform open knot vector with `elements` spans, interior knots of multiplicity
  /// `multiplicity` (1 gives maximal smoothness C^{p-1}).
  static KnotVector uniform(int degree, int elements, int multiplicity = 1) {
    if (elements < 1) throw PreconditionError("need at least one element");
    std::vector<double> k(degree + 1, 0.0);
    for (int e = 1; e < elements; ++e) {
      for (int m = 0; m < multiplicity; ++m) k.push_back(static_cast<double>(e) / elements);
    }
    k.insert(k.end(), degree + 1, 1.0);
    return KnotVector(degree, std::move(k));
  }

  /// Open knot vector on given breakpoints with per-interior-breakpoint multiplicity.
  static KnotVector from_breakpoints(int degree, std::span<const double> breaks,
                                     std::span<const int> interior_mults) {
    std::vector<double> k(degree + 1, breaks.front());
    for (std::size_t j = 1; j + 1 < breaks.size(); ++j) {
      k.insert(k.end(), interior_mults[j - 1], breaks[j]);
    }
    k.insert(k.end(), degree + 1, breaks.back());
    return KnotVector(degree, std::move(k));
  }

  int degree() const { return degree_; }
  /// Number of basis functions n.
  int size() const { return static_cast<int>(knots_.size()) - degree_ - 1; }
  const std::vector<double>& knots() const { return knots_; }
  double knot(int i) const { return knots_[i]; }
  /// Distinct knot values, zeta_1..zeta_E.
  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<int>& multiplicities() const { return mults_; }
  int num_elements() const { return static_cast<int>(breaks_.size()) - 1; }

  /// Continuity C^{p-m} at interior breakpoint j (1..E-2).
  int continuity(int j) const { return degree_ - mults_[j]; }

  double greville(int i) const {
    if (degree_ == 0) return 0.5 * (knots_[i] + knots_[i + 1]);
    double s = 0.0;
    for (int k = 1; k <= degree_; ++k) s += knots_[i + k];
    return s / degree_;
  }

  /// Largest element length divided by the smallest one.
  double quasi_uniformity() const {
    double hmin = 2.0, hmax = 0.0;
    for (int e = 0; e < num_elements(); ++e) {
      const double h = breaks_[e + 1] - breaks_[e];
      hmin = std::min(hmin, h);
      hmax = std::max(hmax, h);
    }
    return hmax / hmin;
  }

  double max_element_size() const {
    double hmax = 0.0;
    for (int e = 0; e < num_elements(); ++e) hmax = std::max(hmax, breaks_[e + 1] - breaks_[e]);
    return hmax;
  }

  bool operator==(const KnotVector& o) const {
    return degree_ == o.degree_ && knots_ == o.knots_;
  }

 private:
  void build_breakpoints() {
    breaks_.clear();
    mults_.clear();
    for (double k : knots_) {
      if (breaks_.empty() || k != breaks_.back()) {
        breaks_.push_back(k);
        mults_.push_back(1);
      } else {
        ++mults_.back();
      }
    }
  }

  int degree_ = 0;
  std::vector<double> knots_;
  std::vector<double> breaks_;
  std::vector<int> mults_;
};

/// Returns the 0-based knot index i with knots[i] <= t < knots[i+1]; t = 1 maps to
/// the last nonempty span.
inline int find_span(const KnotVector& kv, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    std::ostringstream os;
    os << "parameter " << t << " outside [0,1]";
    throw DomainError(os.str());
  }
  const auto& U = kv.knots();
  const int n = kv.size();
  const int p = kv.degree();
  if (t >= U[n]) return n - 1;
  // upper_bound over the active range [p, n]
  auto it = std::upper_bound(U.begin() + p, U.begin() + n + 1, t);
  return static_cast<int>(it - U.begin()) - 1;
}

/// Values and derivatives of the p+1 basis functions that are nonzero on a span.
struct BasisEvaluation {
  int span = 0;
  int degree = 0;
  int nderiv = 0;
  std::vector<double> ders;  // (nderiv+1) x (degree+1), row k = k-th derivative

  int first() const { return span - degree; }
  double operator()(int k, int j) const { return ders[k * (degree + 1) + j]; }
  double& operator()(int k, int j) { return ders[k * (degree + 1) + j]; }
};

/// Cox-de Boor evaluation of all nonzero basis functions at t with derivatives up
/// to `nderiv`. Orders above the degree are exact zeros.
inline BasisEvaluation eval_basis(const KnotVector& kv, double t, int nderiv = 0, int span = -1) {
  const int p = kv.degree();
  const auto& U = kv.knots();
  BasisEvaluation out;
  out.span = span >= 0 ? span : find_span(kv, t);
  out.degree = p;
  out.nderiv = nderiv;
  out.ders.assign((nderiv + 1) * (p + 1), 0.0);
  const int i = out.span;

  // ndu: upper triangle basis values, lower triangle knot differences.
  std::vector<double> ndu((p + 1) * (p + 1), 0.0);
  std::vector<double> left(p + 1, 0.0), right(p + 1, 0.0);
  auto NDU = [&](int r, int c) -> double& { return ndu[r * (p + 1) + c]; };
  NDU(0, 0) = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = t - U[i + 1 - j];
    right[j] = U[i + j] - t;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      NDU(j, r) = right[r + 1] + left[j - r];
      const double temp = NDU(r, j - 1) / NDU(j, r);
      NDU(r, j) = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    NDU(j, j) = saved;
  }
  for (int j = 0; j <= p; ++j) out(0, j) = NDU(j, p);

  const int kmax = std::min(nderiv, p);
  if (kmax == 0) return out;
  std::vector<double> a(2 * (p + 1), 0.0);
  auto A = [&](int s, int c) -> double& { return a[s * (p + 1) + c]; };
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    A(0, 0) = 1.0;
    for (int k = 1; k <= kmax; ++k) {
      double d = 0.0;
      const int rk = r - k, pk = p - k;
      if (r >= k) {
        A(s2, 0) = A(s1, 0) / NDU(pk + 1, rk);
        d = A(s2, 0) * NDU(rk, pk);
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        A(s2, j) = (A(s1, j) - A(s1, j - 1)) / NDU(pk + 1, rk + j);
        d += A(s2, j) * NDU(rk + j, pk);
      }
      if (r <= pk) {
        A(s2, k) = -A(s1, k - 1) / NDU(pk + 1, r);
        d += A(s2, k) * NDU(r, pk);
      }
      out(k, r) = d;
      std::swap(s1, s2);
    }
  }
  double factor = p;
  for (int k = 1; k <= kmax; ++k) {
    for (int j = 0; j <= p; ++j) out(k, j) *= factor;
    factor *= (p - k);
  }
  return out;
}

/// Evaluates sum_i coeffs[i] B_i(t) (or its k-th derivative).
template <typename T>
T eval_spline(const KnotVector& kv, std::span<const T> coeffs, double t, int deriv = 0) {
  const auto b = eval_basis(kv, t, deriv);
  T acc{};
  for (int j = 0; j <= kv.degree(); ++j) acc = acc + b(deriv, j) * coeffs[b.first() + j];
  return acc;
}

/// Boehm insertion of a single knot t in (0,1). The represented spline is unchanged.
template <typename T>
std::pair<KnotVector, std::vector<T>> insert_knot(const KnotVector& kv, std::span<const T> coeffs,
                                                  double t) {
  const int p = kv.degree();
  const int n = kv.size();
  if (!(t > 0.0 && t < 1.0)) throw DomainError("inserted knot must lie in (0,1)");
  if (static_cast<int>(coeffs.size()) != n)
    throw PreconditionError("coefficient count does not match knot vector");
  const auto& U = kv.knots();
  const int k = find_span(kv, t);
  int s = 0;
  for (double u : U) {
    if (std::abs(u - t) < kKnotSnapTolerance) ++s;
  }
  if (s > 0) t = U[k];  // snap to the existing value
  if (s + 1 > std::max(p, 1)) {
    std::ostringstream os;
    os << "inserting " << t << " would raise its multiplicity above " << p;
    throw PreconditionError(os.str());
  }
  std::vector<double> newU(U.begin(), U.begin() + k + 1);
  newU.push_back(t);
  newU.insert(newU.end(), U.begin() + k + 1, U.end());

  std::vector<T> Q(n + 1);
  for (int i = 0; i <= k - p; ++i) Q[i] = coeffs[i];
  for (int i = k - s; i < n; ++i) Q[i + 1] = coeffs[i];
  for (int i = k - p + 1; i <= k - s; ++i) {
    const double alpha = (t - U[i]) / (U[i + p] - U[i]);
    Q[i] = alpha * coeffs[i] + (1.0 - alpha) * coeffs[i - 1];
  }
  return {KnotVector(p, std::move(newU)), std::move(Q)};
}

/// Bisects every nonempty span `levels` times.
inline KnotVector uniform_refine(const KnotVector& kv, int levels) {
  if (levels < 0) throw PreconditionError("refinement levels must be nonnegative");
  KnotVector out = kv;
  for (int l = 0; l < levels; ++l) {
    const auto& U = out.knots();
    std::vector<double> next;
    next.reserve(2 * U.size());
    for (std::size_t i = 0; i < U.size(); ++i) {
      next.push_back(U[i]);
      if (i + 1 < U.size() && U[i + 1] > U[i]) next.push_back(0.5 * (U[i] + U[i + 1]));
    }
    out = KnotVector(out.degree(), std::move(next), true);
  }
  return out;
}

/// Removes the first and last k knots: an open knot vector of degree p-k on the same
/// breakpoints. Requires the spline space to be C^{k-1} at every interior breakpoint.
inline KnotVector trim_knot_vector(const KnotVector& kv, int k) {
  const int p = kv.degree();
  if (k < 1) throw PreconditionError("trim count must be at least 1");
  if (p < k) {
    std::ostringstream os;
    os << "cannot trim " << k << " knots from a degree " << p << " knot vector";
    throw PreconditionError(os.str());
  }
  const auto& Z = kv.breakpoints();
  const auto& M = kv.multiplicities();
  for (std::size_t j = 1; j + 1 < Z.size(); ++j) {
    if (p - M[j] < k - 1) {
      std::ostringstream os;
      os << "spline space is only C^" << (p - M[j]) << " at breakpoint " << Z[j]
         << ", trimming " << k << " knots needs C^" << (k - 1);
      throw PreconditionError(os.str());
    }
  }
  const auto& U = kv.knots();
  std::vector<double> out(U.begin() + k, U.end() - k);
  return KnotVector(p - k, std::move(out), true);
}

/// Greville abscissae of all basis functions.
inline std::vector<double> greville_points(const KnotVector& kv) {
  std::vector<double> g(kv.size());
  for (int i = 0; i < kv.size(); ++i) g[i] = kv.greville(i);
  return g;
}

}  // namespace igamortar
