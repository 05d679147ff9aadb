#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "igamortar/knot_vector.hpp"

namespace igamortar {

/// Patch sides: south zeta2=0, east zeta1=1, north zeta2=1, west zeta1=0.
enum class Face { South = 0, East = 1, North = 2, West = 3 };

inline constexpr std::array<Face, 4> kAllFaces{Face::South, Face::East, Face::North, Face::West};

inline std::string_view to_string(Face f) {
  switch (f) {
    case Face::South: return "south";
    case Face::East: return "east";
    case Face::North: return "north";
    case Face::West: return "west";
  }
  return "?";
}

inline Face parse_face(std::string_view s) {
  if (s == "south") return Face::South;
  if (s == "east") return Face::East;
  if (s == "north") return Face::North;
  if (s == "west") return Face::West;
  throw InputError("unknown face name '" + std::string(s) + "'");
}

/// Parametric direction running along the face.
inline int face_direction(Face f) { return (f == Face::South || f == Face::North) ? 0 : 1; }

/// Parametric point on a face for the face coordinate t.
inline Vec2 face_point(Face f, double t) {
  switch (f) {
    case Face::South: return {t, 0.0};
    case Face::East: return {1.0, t};
    case Face::North: return {t, 1.0};
    case Face::West: return {0.0, t};
  }
  return {0.0, 0.0};
}

/// Outward normal of the face in the parametric square.
inline Vec2 face_normal_parametric(Face f) {
  switch (f) {
    case Face::South: return {0.0, -1.0};
    case Face::East: return {1.0, 0.0};
    case Face::North: return {0.0, 1.0};
    case Face::West: return {-1.0, 0.0};
  }
  return {0.0, 0.0};
}

/// The two faces meeting at the start (t=0) and end (t=1) of a face.
inline Face adjacent_face(Face f, bool at_end) {
  if (face_direction(f) == 0) return at_end ? Face::East : Face::West;
  return at_end ? Face::North : Face::South;
}

/// Geometry value and first derivatives at a parametric point.
struct PatchPoint {
  Vec2 x{};
  Mat2 jac{};       // column c = dF/dzeta_c
  double weight = 1.0;  // NURBS weight function DW
};

/// Tensor-product NURBS patch in R^2. Control points and weights are stored
/// row-major over (i1, i2): flat index i1 * n2 + i2.
class NurbsPatch {
 public:
  NurbsPatch() = default;

  NurbsPatch(KnotVector k1, KnotVector k2, std::vector<Vec2> control_points,
             std::vector<double> weights = {})
      : knots_{std::move(k1), std::move(k2)}, cps_(std::move(control_points)), w_(std::move(weights)) {
    const std::size_t n = static_cast<std::size_t>(knots_[0].size()) * knots_[1].size();
    if (w_.empty()) w_.assign(n, 1.0);
    if (cps_.size() != n || w_.size() != n) {
      std::ostringstream os;
      os << "control net has " << cps_.size() << " points and " << w_.size()
         << " weights, knot vectors require " << n;
      throw PreconditionError(os.str());
    }
    for (double w : w_) {
      if (!(w > 0.0)) throw PreconditionError("NURBS weights must be positive");
    }
  }

  /// Bilinear patch through four corners given at zeta = (0,0), (1,0), (0,1), (1,1).
  static NurbsPatch bilinear(Vec2 c00, Vec2 c10, Vec2 c01, Vec2 c11) {
    return NurbsPatch(KnotVector::uniform(1, 1), KnotVector::uniform(1, 1), {c00, c01, c10, c11});
  }

  static NurbsPatch unit_square() { return bilinear({0, 0}, {1, 0}, {0, 1}, {1, 1}); }

  const KnotVector& knots(int dir) const { return knots_[dir]; }
  int size(int dir) const { return knots_[dir].size(); }
  int degree(int dir) const { return knots_[dir].degree(); }
  const std::vector<Vec2>& control_points() const { return cps_; }
  const std::vector<double>& weights() const { return w_; }
  int index(int i1, int i2) const { return i1 * knots_[1].size() + i2; }

  PatchPoint evaluate(const Vec2& zeta) const {
    const auto b1 = eval_basis(knots_[0], zeta[0], 1);
    const auto b2 = eval_basis(knots_[1], zeta[1], 1);
    const int p1 = knots_[0].degree(), p2 = knots_[1].degree();
    double W = 0.0, W1 = 0.0, W2 = 0.0;
    Vec2 A{}, A1{}, A2{};
    for (int a = 0; a <= p1; ++a) {
      for (int b = 0; b <= p2; ++b) {
        const int id = index(b1.first() + a, b2.first() + b);
        const double w = w_[id];
        const double n00 = b1(0, a) * b2(0, b) * w;
        const double n10 = b1(1, a) * b2(0, b) * w;
        const double n01 = b1(0, a) * b2(1, b) * w;
        W += n00;
        W1 += n10;
        W2 += n01;
        A = A + n00 * cps_[id];
        A1 = A1 + n10 * cps_[id];
        A2 = A2 + n01 * cps_[id];
      }
    }
    PatchPoint out;
    out.weight = W;
    out.x = (1.0 / W) * A;
    const Vec2 d1 = (1.0 / W) * (A1 - W1 * out.x);
    const Vec2 d2 = (1.0 / W) * (A2 - W2 * out.x);
    out.jac = Mat2{{d1[0], d2[0], d1[1], d2[1]}};
    return out;
  }

 private:
  std::array<KnotVector, 2> knots_;
  std::vector<Vec2> cps_;
  std::vector<double> w_;
};

namespace detail {

/// Homogeneous control point (w x, w y, w).
struct Homogeneous {
  double x = 0.0, y = 0.0, w = 0.0;
  friend Homogeneous operator+(const Homogeneous& a, const Homogeneous& b) {
    return {a.x + b.x, a.y + b.y, a.w + b.w};
  }
  friend Homogeneous operator*(double s, const Homogeneous& a) { return {s * a.x, s * a.y, s * a.w}; }
};

}  // namespace detail

/// Inserts knot t in direction dir; the geometric map is unchanged.
inline NurbsPatch insert_knot(const NurbsPatch& patch, int dir, double t) {
  const int n1 = patch.size(0), n2 = patch.size(1);
  const int other = 1 - dir;
  const int n_line = patch.size(dir), n_other = patch.size(other);
  KnotVector new_kv;
  std::vector<std::vector<detail::Homogeneous>> lines;
  for (int o = 0; o < n_other; ++o) {
    std::vector<detail::Homogeneous> line(n_line);
    for (int i = 0; i < n_line; ++i) {
      const int id = dir == 0 ? patch.index(i, o) : patch.index(o, i);
      const double w = patch.weights()[id];
      const Vec2& c = patch.control_points()[id];
      line[i] = {w * c[0], w * c[1], w};
    }
    auto [kv, q] = insert_knot<detail::Homogeneous>(patch.knots(dir), line, t);
    new_kv = kv;
    lines.push_back(std::move(q));
  }
  const int m1 = dir == 0 ? n1 + 1 : n1;
  const int m2 = dir == 1 ? n2 + 1 : n2;
  std::vector<Vec2> cps(m1 * m2);
  std::vector<double> ws(m1 * m2);
  for (int i1 = 0; i1 < m1; ++i1)
    for (int i2 = 0; i2 < m2; ++i2) {
      const auto& h = dir == 0 ? lines[i2][i1] : lines[i1][i2];
      cps[i1 * m2 + i2] = {h.x / h.w, h.y / h.w};
      ws[i1 * m2 + i2] = h.w;
    }
  return dir == 0 ? NurbsPatch(new_kv, patch.knots(1), cps, ws) : NurbsPatch(patch.knots(0), new_kv, cps, ws);
}

/// Bisects every element of direction dir `levels` times by knot insertion.
inline NurbsPatch refine_patch(NurbsPatch patch, int dir, int levels) {
  for (int l = 0; l < levels; ++l) {
    const auto Z = patch.knots(dir).breakpoints();
    for (std::size_t e = 0; e + 1 < Z.size(); ++e) patch = insert_knot(patch, dir, 0.5 * (Z[e] + Z[e + 1]));
  }
  return patch;
}

/// Threshold below which a Jacobian determinant is treated as degenerate.
inline constexpr double kSingularJacobian = 1e-10;

inline void check_parametric(const Vec2& z) {
  if (!(z[0] >= 0.0 && z[0] <= 1.0 && z[1] >= 0.0 && z[1] <= 1.0)) {
    std::ostringstream os;
    os << "parametric point (" << z[0] << ", " << z[1] << ") outside the unit square";
    throw DomainError(os.str());
  }
}

inline Vec2 map_point(const NurbsPatch& patch, const Vec2& zeta) {
  check_parametric(zeta);
  return patch.evaluate(zeta).x;
}

inline Mat2 jacobian(const NurbsPatch& patch, const Vec2& zeta) {
  check_parametric(zeta);
  const Mat2 J = patch.evaluate(zeta).jac;
  if (std::abs(J.det()) <= kSingularJacobian) {
    std::ostringstream os;
    os << "degenerate geometry map at (" << zeta[0] << ", " << zeta[1] << "), det = " << J.det();
    throw GeometryError(os.str());
  }
  return J;
}

/// Length of the tangent vector dF/dt along the face at face coordinate t.
inline double edge_measure(const NurbsPatch& patch, Face face, double t) {
  const Vec2 z = face_point(face, t);
  check_parametric(z);
  return norm(patch.evaluate(z).jac.column(face_direction(face)));
}

/// Outward unit normal of the physical face at face coordinate t.
inline Vec2 outward_normal(const NurbsPatch& patch, Face face, double t) {
  const Mat2 J = patch.evaluate(face_point(face, t)).jac;
  const Vec2 n = J.inverse().transpose() * face_normal_parametric(face);
  return (1.0 / norm(n)) * n;
}

struct InversionResult {
  Vec2 zeta{};
  double residual = 0.0;  // |F(zeta) - x|
  int iterations = 0;
};

namespace detail {

inline double clamp01(double t) { return std::clamp(t, 0.0, 1.0); }

/// Closest point on one face: grid seed then Gauss-Newton on |F(face(t)) - x|^2.
inline InversionResult invert_on_face(const NurbsPatch& patch, const Vec2& x, Face face,
                                      int max_iter, double tol) {
  constexpr int kSeeds = 32;
  const int dir = face_direction(face);
  double t = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s <= kSeeds; ++s) {
    const double ts = static_cast<double>(s) / kSeeds;
    const double r = norm(patch.evaluate(face_point(face, ts)).x - x);
    if (r < best) {
      best = r;
      t = ts;
    }
  }
  for (int it = 1; it <= max_iter; ++it) {
    const PatchPoint pp = patch.evaluate(face_point(face, t));
    const Vec2 tangent = pp.jac.column(dir);
    const Vec2 r = x - pp.x;
    const double step = dot(r, tangent) / dot(tangent, tangent);
    const double tn = clamp01(t + step);
    const double dt = tn - t;
    t = tn;
    if (std::abs(dt) < tol) {
      const Vec2 z = face_point(face, t);
      return {z, norm(patch.evaluate(z).x - x), it};
    }
  }
  const Vec2 z = face_point(face, t);
  const double res = norm(patch.evaluate(z).x - x);
  std::ostringstream os;
  os << "face inversion did not converge in " << max_iter << " iterations at (" << x[0] << ", "
     << x[1] << "), best residual " << res;
  throw InversionError(os.str(), res, x);
}

}  // namespace detail

/// Finds zeta with F(zeta) = x by Newton iteration. With a face given, the search is
/// restricted to that face and returns the closest point (nonzero residual when the
/// point lies off the face image, e.g. for non-matching interfaces). Without a face,
/// points outside the patch image are projected onto the nearest face.
inline InversionResult invert_point(const NurbsPatch& patch, const Vec2& x,
                                    std::optional<Face> face = std::nullopt, int max_iter = 50,
                                    double tol = 1e-12) {
  if (face) return detail::invert_on_face(patch, x, *face, max_iter, tol);

  constexpr int kGrid = 16;
  Vec2 z{0.5, 0.5};
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a <= kGrid; ++a) {
    for (int b = 0; b <= kGrid; ++b) {
      const Vec2 zs{static_cast<double>(a) / kGrid, static_cast<double>(b) / kGrid};
      const double r = norm(patch.evaluate(zs).x - x);
      if (r < best) {
        best = r;
        z = zs;
      }
    }
  }
  for (int it = 1; it <= max_iter; ++it) {
    const PatchPoint pp = patch.evaluate(z);
    const double det = pp.jac.det();
    if (std::abs(det) <= kSingularJacobian) break;
    const Vec2 step = pp.jac.inverse() * (x - pp.x);
    const Vec2 zn{detail::clamp01(z[0] + step[0]), detail::clamp01(z[1] + step[1])};
    const double dz = norm(zn - z);
    z = zn;
    if (dz < tol) {
      const double res = norm(patch.evaluate(z).x - x);
      const bool on_boundary = z[0] == 0.0 || z[0] == 1.0 || z[1] == 0.0 || z[1] == 1.0;
      if (res > 1e-10 && on_boundary) break;  // outside the image: project on faces
      return {z, res, it};
    }
  }
  InversionResult best_face;
  best_face.residual = std::numeric_limits<double>::infinity();
  for (Face f : kAllFaces) {
    try {
      auto r = detail::invert_on_face(patch, x, f, max_iter, tol);
      if (r.residual < best_face.residual) best_face = r;
    } catch (const InversionError&) {
    }
  }
  if (!std::isfinite(best_face.residual)) {
    throw InversionError("point inversion failed on every face", best, x);
  }
  return best_face;
}

}  // namespace igamortar
