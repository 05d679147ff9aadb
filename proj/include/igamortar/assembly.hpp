#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "igamortar/quadrature.hpp"
#include "igamortar/sparse.hpp"
#include "igamortar/spaces.hpp"

namespace igamortar {

/// Quadrature data of one element: basis values and physical gradients at every point.
struct ElementData {
  std::vector<int> dofs;       // local -> patch flat dof
  int nq = 0;
  int nloc = 0;
  std::vector<Vec2> x;         // physical points
  std::vector<double> w;       // weights including |det J|
  std::vector<double> N;       // nq x nloc
  std::vector<Vec2> dN;        // nq x nloc, physical gradients

  double value(int q, int a) const { return N[q * nloc + a]; }
  const Vec2& grad(int q, int a) const { return dN[q * nloc + a]; }
};

/// Calls f(ElementData) for every element of the space with q Gauss points per direction.
template <typename F>
void for_each_element(const NurbsPatch& patch, const SplineSpace& space, int q, F&& f) {
  const QuadratureRule rule(q);
  const auto& k1 = space.knots(0);
  const auto& k2 = space.knots(1);
  const int p1 = k1.degree(), p2 = k2.degree();
  const auto& Z1 = k1.breakpoints();
  const auto& Z2 = k2.breakpoints();
  ElementData ed;
  ed.nloc = (p1 + 1) * (p2 + 1);
  ed.nq = q * q;
  ed.dofs.resize(ed.nloc);
  ed.x.resize(ed.nq);
  ed.w.resize(ed.nq);
  ed.N.resize(ed.nq * ed.nloc);
  ed.dN.resize(ed.nq * ed.nloc);
  std::vector<BasisEvaluation> b1(q), b2(q);
  for (std::size_t e1 = 0; e1 + 1 < Z1.size(); ++e1) {
    const double a1 = Z1[e1], c1 = Z1[e1 + 1];
    const int s1 = find_span(k1, 0.5 * (a1 + c1));
    for (int i = 0; i < q; ++i) b1[i] = eval_basis(k1, rule.node(i, a1, c1), 1, s1);
    for (std::size_t e2 = 0; e2 + 1 < Z2.size(); ++e2) {
      const double a2 = Z2[e2], c2 = Z2[e2 + 1];
      const int s2 = find_span(k2, 0.5 * (a2 + c2));
      for (int i = 0; i < q; ++i) b2[i] = eval_basis(k2, rule.node(i, a2, c2), 1, s2);
      for (int a = 0; a <= p1; ++a)
        for (int b = 0; b <= p2; ++b) ed.dofs[a * (p2 + 1) + b] = space.index(s1 - p1 + a, s2 - p2 + b);
      for (int i = 0; i < q; ++i) {
        for (int j = 0; j < q; ++j) {
          const int qp = i * q + j;
          const Vec2 z{rule.node(i, a1, c1), rule.node(j, a2, c2)};
          const PatchPoint pp = patch.evaluate(z);
          const double det = pp.jac.det();
          if (std::abs(det) <= kSingularJacobian) {
            std::ostringstream os;
            os << "degenerate geometry map at (" << z[0] << ", " << z[1] << ")";
            throw GeometryError(os.str());
          }
          const Mat2 JinvT = pp.jac.inverse().transpose();
          ed.x[qp] = pp.x;
          ed.w[qp] = rule.weight(i, a1, c1) * rule.weight(j, a2, c2) * std::abs(det);
          for (int a = 0; a <= p1; ++a) {
            for (int b = 0; b <= p2; ++b) {
              const int loc = a * (p2 + 1) + b;
              ed.N[qp * ed.nloc + loc] = b1[i](0, a) * b2[j](0, b);
              const Vec2 gz{b1[i](1, a) * b2[j](0, b), b1[i](0, a) * b2[j](1, b)};
              ed.dN[qp * ed.nloc + loc] = JinvT * gz;
            }
          }
        }
      }
      f(static_cast<const ElementData&>(ed));
    }
  }
}

/// Face quadrature point: physical point, outward normal, measure weight, face coordinate.
struct FacePoint {
  double t;
  Vec2 x;
  Vec2 normal;
  double w;
};

/// Calls f(FacePoint) at q Gauss points on every segment between the sorted face
/// parameters Z.
template <typename F>
void for_each_face_point(const NurbsPatch& patch, Face face, const std::vector<double>& Z, int q, F&& f) {
  const QuadratureRule rule(q);
  const int dir = face_direction(face);
  for (std::size_t e = 0; e + 1 < Z.size(); ++e) {
    for (int i = 0; i < q; ++i) {
      const double t = rule.node(i, Z[e], Z[e + 1]);
      const PatchPoint pp = patch.evaluate(face_point(face, t));
      const Vec2 n = pp.jac.inverse().transpose() * face_normal_parametric(face);
      f(FacePoint{t, pp.x, (1.0 / norm(n)) * n, rule.weight(i, Z[e], Z[e + 1]) * norm(pp.jac.column(dir))});
    }
  }
}

/// Calls f(FacePoint) at q Gauss points on every element of the face knot vector kv.
template <typename F>
void for_each_face_point(const NurbsPatch& patch, Face face, const KnotVector& kv, int q, F&& f) {
  for_each_face_point(patch, face, kv.breakpoints(), q, std::forward<F>(f));
}

struct PatchSystem {
  SparseMatrix A;
  std::vector<double> f;
};

inline void check_coefficients(double alpha, double beta, const Vec2& x) {
  if (!(alpha > 0.0) || !(beta >= 0.0)) {
    std::ostringstream os;
    os << "invalid coefficients alpha=" << alpha << ", beta=" << beta << " at (" << x[0] << ", "
       << x[1] << ")";
    throw CoefficientError(os.str());
  }
}

/// Galerkin matrix of a(u,v) = int alpha grad u . grad v + beta u v and load int f v.
inline PatchSystem assemble_scalar(const NurbsPatch& patch, const SplineSpace& space,
                                   const ScalarField& alpha, const ScalarField& beta,
                                   const ScalarField& source, int q = -1) {
  if (q < 0) q = std::max(space.degree(0), space.degree(1)) + 1;
  const int n = space.dim();
  std::vector<Triplet> trip;
  std::vector<double> f(n, 0.0);
  std::vector<double> Ke;
  for_each_element(patch, space, q, [&](const ElementData& ed) {
    const int m = ed.nloc;
    Ke.assign(m * m, 0.0);
    for (int qp = 0; qp < ed.nq; ++qp) {
      const Vec2& x = ed.x[qp];
      const double al = alpha(x), be = beta(x);
      check_coefficients(al, be, x);
      const double w = ed.w[qp];
      const double fx = source ? source(x) : 0.0;
      for (int a = 0; a < m; ++a) {
        const double Na = ed.value(qp, a);
        const Vec2& Ga = ed.grad(qp, a);
        f[ed.dofs[a]] += w * fx * Na;
        for (int b = a; b < m; ++b) {
          Ke[a * m + b] += w * (al * dot(Ga, ed.grad(qp, b)) + be * Na * ed.value(qp, b));
        }
      }
    }
    for (int a = 0; a < m; ++a)
      for (int b = a; b < m; ++b) {
        trip.push_back({ed.dofs[a], ed.dofs[b], Ke[a * m + b]});
        if (b != a) trip.push_back({ed.dofs[b], ed.dofs[a], Ke[a * m + b]});
      }
  });
  return {SparseMatrix::from_triplets(n, n, std::move(trip)), std::move(f)};
}

/// Plane-strain elasticity, unknowns blocked by component: c * n + flat.
inline PatchSystem assemble_elasticity(const NurbsPatch& patch, const SplineSpace& space,
                                       double lambda, double mu, const VectorField& body_force,
                                       int q = -1) {
  if (!(mu > 0.0) || !(lambda >= 0.0)) {
    std::ostringstream os;
    os << "invalid Lame parameters lambda=" << lambda << ", mu=" << mu;
    throw CoefficientError(os.str());
  }
  if (q < 0) q = std::max(space.degree(0), space.degree(1)) + 1;
  const int n = space.dim();
  std::vector<Triplet> trip;
  std::vector<double> f(2 * n, 0.0);
  std::vector<double> Ke;
  for_each_element(patch, space, q, [&](const ElementData& ed) {
    const int m = ed.nloc;
    const int M = 2 * m;
    Ke.assign(M * M, 0.0);
    for (int qp = 0; qp < ed.nq; ++qp) {
      const double w = ed.w[qp];
      const Vec2 bf = body_force ? body_force(ed.x[qp]) : Vec2{0.0, 0.0};
      for (int a = 0; a < m; ++a) {
        const Vec2& Ga = ed.grad(qp, a);
        const double Na = ed.value(qp, a);
        f[ed.dofs[a]] += w * bf[0] * Na;
        f[n + ed.dofs[a]] += w * bf[1] * Na;
        for (int b = 0; b < m; ++b) {
          const Vec2& Gb = ed.grad(qp, b);
          const double gg = dot(Ga, Gb);
          for (int c = 0; c < 2; ++c)
            for (int d = 0; d < 2; ++d) {
              double v = lambda * Ga[c] * Gb[d] + mu * Ga[d] * Gb[c];
              if (c == d) v += mu * gg;
              Ke[(c * m + a) * M + d * m + b] += w * v;
            }
        }
      }
    }
    for (int c = 0; c < 2; ++c)
      for (int a = 0; a < m; ++a)
        for (int d = 0; d < 2; ++d)
          for (int b = 0; b < m; ++b)
            trip.push_back({c * n + ed.dofs[a], d * n + ed.dofs[b], Ke[(c * m + a) * M + d * m + b]});
  });
  return {SparseMatrix::from_triplets(2 * n, 2 * n, std::move(trip)), std::move(f)};
}

struct DiscretizationOptions {
  int degree = 2;
  int refine = 0;
  std::vector<int> extra_refine;  // per patch, added to refine
  Pairing pairing{};
  int components = 1;  // 1 scalar, 2 plane elasticity
};

/// Global numbering: primal unknowns per patch (component-blocked), then multipliers
/// per interface (component-blocked).
struct DofMap {
  int components = 1;
  std::vector<int> patch_offset;
  std::vector<int> patch_size;  // scalar dimension of each patch space
  std::vector<int> mult_offset;
  std::vector<int> mult_size;   // scalar dimension of each multiplier space
  int num_primal = 0;
  int num_multipliers = 0;

  int primal(int patch, int comp, int flat) const {
    return patch_offset[patch] + comp * patch_size[patch] + flat;
  }
  int multiplier(int l, int comp, int j) const { return mult_offset[l] + comp * mult_size[l] + j; }
  int interface_of_multiplier(int m) const {
    for (std::size_t l = 0; l < mult_offset.size(); ++l)
      if (m >= mult_offset[l] && m < mult_offset[l] + components * mult_size[l]) return int(l);
    return -1;
  }
};

struct Discretization {
  MultipatchDomain domain;
  DiscretizationOptions options;
  std::vector<SplineSpace> spaces;
  std::vector<MultiplierSpace> multipliers;
  DofMap dofs;

  /// Largest parametric element size over all patches.
  double mesh_size() const {
    double h = 0.0;
    for (const auto& s : spaces) h = std::max(h, s.mesh_size());
    return h;
  }
};

inline Discretization discretize(MultipatchDomain domain, const DiscretizationOptions& opt) {
  domain.validate();
  Discretization d;
  d.options = opt;
  const int np = domain.num_patches();
  for (int k = 0; k < np; ++k) {
    const int extra = k < static_cast<int>(opt.extra_refine.size()) ? opt.extra_refine[k] : 0;
    d.spaces.push_back(SplineSpace::on_patch(domain.patches[k], opt.degree, opt.refine + extra));
  }
  for (int l = 0; l < domain.num_interfaces(); ++l) {
    const auto& g = domain.interfaces[l];
    const auto [s0, s1] = domain.cross_points(l);
    d.multipliers.push_back(
        build_multiplier_space(d.spaces[g.slave].face_knots(g.slave_face), opt.pairing, s0, s1, l));
  }
  auto& m = d.dofs;
  m.components = opt.components;
  for (int k = 0; k < np; ++k) {
    m.patch_offset.push_back(m.num_primal);
    m.patch_size.push_back(d.spaces[k].dim());
    m.num_primal += opt.components * d.spaces[k].dim();
  }
  for (const auto& ms : d.multipliers) {
    m.mult_offset.push_back(m.num_multipliers);
    m.mult_size.push_back(ms.size());
    m.num_multipliers += opt.components * ms.size();
  }
  d.domain = std::move(domain);
  return d;
}

/// Coupling rows of interface l: entry (j, i) = int mu_j [v_i] with [v] = master - slave,
/// integrated on the slave face with q points per slave element. Rows are local to the
/// interface (component-blocked), columns are global primal ids.
/// Slave face breakpoints merged with the master face breakpoints projected onto the
/// slave face, so that every segment is polynomial on both sides.
inline std::vector<double> interface_breakpoints(const Discretization& d, int l) {
  const auto& g = d.domain.interfaces[l];
  const auto& Ps = d.domain.patches[g.slave];
  const auto& Pm = d.domain.patches[g.master];
  std::vector<double> Z = d.spaces[g.slave].face_knots(g.slave_face).breakpoints();
  const auto& Zm = d.spaces[g.master].face_knots(g.master_face).breakpoints();
  const int dir_s = face_direction(g.slave_face);
  for (std::size_t i = 1; i + 1 < Zm.size(); ++i) {
    const Vec2 x = map_point(Pm, face_point(g.master_face, Zm[i]));
    const double t = invert_point(Ps, x, g.slave_face).zeta[dir_s];
    if (t > 0.0 && t < 1.0) Z.push_back(t);
  }
  std::sort(Z.begin(), Z.end());
  std::vector<double> out;
  for (double t : Z)
    if (out.empty() || t - out.back() > 1e-12) out.push_back(t);
  return out;
}

inline std::vector<Triplet> assemble_coupling(const Discretization& d, int l, int q = -1) {
  const auto& g = d.domain.interfaces[l];
  const auto& ms = d.multipliers[l];
  const auto& Ss = d.spaces[g.slave];
  const auto& Sm = d.spaces[g.master];
  const auto& Ps = d.domain.patches[g.slave];
  const auto& Pm = d.domain.patches[g.master];
  const KnotVector& kvs = Ss.face_knots(g.slave_face);
  const KnotVector& kvm = Sm.face_knots(g.master_face);
  const auto sd = Ss.face_dofs(g.slave_face);
  const auto md = Sm.face_dofs(g.master_face);
  const int dir_m = face_direction(g.master_face);
  if (q < 0) q = kvs.degree() + 2;
  const int nc = d.dofs.components;
  std::vector<Triplet> trip;
  for_each_face_point(Ps, g.slave_face, interface_breakpoints(d, l), q, [&](const FacePoint& fp) {
    const auto mu = ms.eval(fp.t);
    const auto bs = eval_basis(kvs, fp.t, 0);
    InversionResult inv;
    try {
      inv = invert_point(Pm, fp.x, g.master_face);
    } catch (const InversionError& e) {
      std::ostringstream os;
      os << "interface " << l << ": " << e.what();
      throw InversionError(os.str(), e.best_residual(), e.point());
    }
    const auto bm = eval_basis(kvm, inv.zeta[dir_m], 0);
    for (auto [j, mv] : mu) {
      for (int c = 0; c < nc; ++c) {
        const int row = c * ms.size() + j;
        for (int a = 0; a <= kvm.degree(); ++a) {
          const double v = bm(0, a);
          if (v != 0.0) trip.push_back({row, d.dofs.primal(g.master, c, md[bm.first() + a]), fp.w * mv * v});
        }
        for (int a = 0; a <= kvs.degree(); ++a) {
          const double v = bs(0, a);
          if (v != 0.0) trip.push_back({row, d.dofs.primal(g.slave, c, sd[bs.first() + a]), -fp.w * mv * v});
        }
      }
    }
  });
  return trip;
}

/// Right-hand side data of the scalar problem.
struct ScalarData {
  ScalarField source;
  ScalarField dirichlet;
  /// Neumann flux g(x, n) with n the outward unit normal.
  std::function<double(const Vec2&, const Vec2&)> neumann;
};

struct ElasticData {
  VectorField body_force;
  VectorField dirichlet;
  std::function<Vec2(const Vec2&, const Vec2&)> traction;
};

/// Block system [[A, B^T], [B, 0]] with right-hand side f, before Dirichlet elimination.
struct SaddleSystem {
  SparseMatrix A;
  SparseMatrix B;
  std::vector<double> f;
  DofMap dofs;
  std::vector<char> fixed;          // per primal dof
  std::vector<double> fixed_value;  // prescribed value where fixed
};

/// Interpolates g at the Greville points of the face knot vector; returns one coefficient
/// per face function.
inline std::vector<double> interpolate_face(const NurbsPatch& patch, Face face, const KnotVector& kv,
                                            const ScalarField& g) {
  const int n = kv.size();
  DenseMatrix C(n, n);
  std::vector<double> rhs(n);
  for (int k = 0; k < n; ++k) {
    const double t = kv.greville(k);
    const auto b = eval_basis(kv, t, 0);
    for (int a = 0; a <= kv.degree(); ++a) C(k, b.first() + a) = b(0, a);
    rhs[k] = g(map_point(patch, face_point(face, t)));
  }
  return dense_solve(C, rhs);
}

namespace detail {

inline void collect_dirichlet(const Discretization& d, SaddleSystem& s,
                              const std::function<double(int comp, const Vec2&)>& data) {
  s.fixed.assign(d.dofs.num_primal, 0);
  s.fixed_value.assign(d.dofs.num_primal, 0.0);
  const int nc = d.dofs.components;
  for (int k = 0; k < d.domain.num_patches(); ++k) {
    for (Face face : kAllFaces) {
      const auto bc = d.domain.condition(k, face);
      if (!bc || bc->kind != BoundaryKind::Dirichlet) continue;
      const auto& kv = d.spaces[k].face_knots(face);
      const auto fd = d.spaces[k].face_dofs(face);
      for (int c = 0; c < nc; ++c) {
        if (nc > 1 && !bc->components[c]) continue;
        const auto vals = interpolate_face(d.domain.patches[k], face, kv,
                                           [&](const Vec2& x) { return data(c, x); });
        for (std::size_t i = 0; i < fd.size(); ++i) {
          const int id = d.dofs.primal(k, c, fd[i]);
          s.fixed[id] = 1;
          s.fixed_value[id] = vals[i];
        }
      }
    }
  }
}

inline SparseMatrix assemble_all_coupling(const Discretization& d) {
  std::vector<Triplet> trip;
  for (int l = 0; l < d.domain.num_interfaces(); ++l) {
    for (auto t : assemble_coupling(d, l)) {
      t.row += d.dofs.mult_offset[l];
      trip.push_back(t);
    }
  }
  return SparseMatrix::from_triplets(d.dofs.num_multipliers, d.dofs.num_primal, std::move(trip));
}

}  // namespace detail

inline SaddleSystem assemble_system(const Discretization& d, const ScalarData& data) {
  if (d.dofs.components != 1) throw PreconditionError("scalar assembly needs a scalar discretization");
  SaddleSystem s;
  s.dofs = d.dofs;
  s.f.assign(d.dofs.num_primal, 0.0);
  std::vector<Triplet> trip;
  for (int k = 0; k < d.domain.num_patches(); ++k) {
    const auto& co = d.domain.coeffs(k);
    auto ps = assemble_scalar(d.domain.patches[k], d.spaces[k], co.alpha, co.beta, data.source);
    const int off = d.dofs.patch_offset[k];
    for (auto t : ps.A.triplets()) trip.push_back({t.row + off, t.col + off, t.value});
    for (std::size_t i = 0; i < ps.f.size(); ++i) s.f[off + i] += ps.f[i];
    for (Face face : kAllFaces) {
      const auto bc = d.domain.condition(k, face);
      if (!bc || bc->kind != BoundaryKind::Neumann || !data.neumann) continue;
      const auto& kv = d.spaces[k].face_knots(face);
      const auto fd = d.spaces[k].face_dofs(face);
      for_each_face_point(d.domain.patches[k], face, kv, kv.degree() + 2, [&](const FacePoint& fp) {
        const double gv = data.neumann(fp.x, fp.normal);
        const auto b = eval_basis(kv, fp.t, 0);
        for (int a = 0; a <= kv.degree(); ++a) s.f[off + fd[b.first() + a]] += fp.w * gv * b(0, a);
      });
    }
  }
  s.A = SparseMatrix::from_triplets(d.dofs.num_primal, d.dofs.num_primal, std::move(trip));
  s.B = detail::assemble_all_coupling(d);
  detail::collect_dirichlet(d, s, [&](int, const Vec2& x) { return data.dirichlet ? data.dirichlet(x) : 0.0; });
  return s;
}

inline SaddleSystem assemble_system(const Discretization& d, const ElasticData& data) {
  if (d.dofs.components != 2) throw PreconditionError("elasticity assembly needs two components");
  SaddleSystem s;
  s.dofs = d.dofs;
  s.f.assign(d.dofs.num_primal, 0.0);
  std::vector<Triplet> trip;
  for (int k = 0; k < d.domain.num_patches(); ++k) {
    const auto& co = d.domain.coeffs(k);
    auto ps = assemble_elasticity(d.domain.patches[k], d.spaces[k], co.lambda, co.mu, data.body_force);
    const int off = d.dofs.patch_offset[k];
    const int n = d.dofs.patch_size[k];
    for (auto t : ps.A.triplets()) trip.push_back({t.row + off, t.col + off, t.value});
    for (std::size_t i = 0; i < ps.f.size(); ++i) s.f[off + i] += ps.f[i];
    for (Face face : kAllFaces) {
      const auto bc = d.domain.condition(k, face);
      if (!bc || !data.traction) continue;
      // a partially constrained face carries traction on its free components
      std::array<bool, 2> loaded{true, true};
      if (bc->kind == BoundaryKind::Dirichlet) loaded = {!bc->components[0], !bc->components[1]};
      if (!loaded[0] && !loaded[1]) continue;
      const auto& kv = d.spaces[k].face_knots(face);
      const auto fd = d.spaces[k].face_dofs(face);
      for_each_face_point(d.domain.patches[k], face, kv, kv.degree() + 2, [&](const FacePoint& fp) {
        const Vec2 tr = data.traction(fp.x, fp.normal);
        const auto b = eval_basis(kv, fp.t, 0);
        for (int c = 0; c < 2; ++c) {
          if (!loaded[c]) continue;
          for (int a = 0; a <= kv.degree(); ++a) s.f[off + c * n + fd[b.first() + a]] += fp.w * tr[c] * b(0, a);
        }
      });
    }
  }
  s.A = SparseMatrix::from_triplets(d.dofs.num_primal, d.dofs.num_primal, std::move(trip));
  s.B = detail::assemble_all_coupling(d);
  detail::collect_dirichlet(d, s, [&](int c, const Vec2& x) { return data.dirichlet ? data.dirichlet(x)[c] : 0.0; });
  return s;
}

/// KKT system on the free unknowns: [[A_FF, B_F^T], [B_F, 0]] with right-hand side
/// [f_F - A_FD u_D; -B_D u_D]. Unknown order: free primal dofs, then multipliers.
struct ReducedSystem {
  SparseMatrix K;
  std::vector<double> rhs;
  std::vector<int> free;      // reduced primal index -> global primal dof
  std::vector<int> reduced;   // global primal dof -> reduced index or -1
  int num_multipliers = 0;
};

inline ReducedSystem apply_dirichlet(const SaddleSystem& s) {
  const int nv = s.dofs.num_primal;
  ReducedSystem r;
  r.reduced.assign(nv, -1);
  for (int i = 0; i < nv; ++i) {
    if (!s.fixed[i]) {
      r.reduced[i] = static_cast<int>(r.free.size());
      r.free.push_back(i);
    }
  }
  const int nf = static_cast<int>(r.free.size());
  const int nm = s.B.rows();
  r.num_multipliers = nm;
  r.rhs.assign(nf + nm, 0.0);
  std::vector<Triplet> trip;
  for (int i = 0; i < nv; ++i) {
    const int ri = r.reduced[i];
    if (ri < 0) continue;
    r.rhs[ri] += s.f[i];
    for (int k = s.A.row_ptr()[i]; k < s.A.row_ptr()[i + 1]; ++k) {
      const int j = s.A.col_idx()[k];
      const double v = s.A.values()[k];
      if (r.reduced[j] >= 0)
        trip.push_back({ri, r.reduced[j], v});
      else
        r.rhs[ri] -= v * s.fixed_value[j];
    }
  }
  for (int m = 0; m < nm; ++m) {
    for (int k = s.B.row_ptr()[m]; k < s.B.row_ptr()[m + 1]; ++k) {
      const int j = s.B.col_idx()[k];
      const double v = s.B.values()[k];
      if (r.reduced[j] >= 0) {
        trip.push_back({nf + m, r.reduced[j], v});
        trip.push_back({r.reduced[j], nf + m, v});
      } else {
        r.rhs[nf + m] -= v * s.fixed_value[j];
      }
    }
  }
  r.K = SparseMatrix::from_triplets(nf + nm, nf + nm, std::move(trip));
  return r;
}

struct Solution {
  std::vector<double> u;       // all primal coefficients, Dirichlet values included
  std::vector<double> lambda;  // multiplier coefficients
  double residual = 0.0;             // ||K x - rhs||_inf of the reduced system
  double constraint_residual = 0.0;  // ||B u||_inf
};

inline Solution solve_saddle(const SaddleSystem& s, int refinement_steps = 2) {
  const ReducedSystem r = apply_dirichlet(s);
  const int nf = static_cast<int>(r.free.size());
  const int n = nf + r.num_multipliers;
  // multiplier rows and columns scaled by max|A| / max|B|
  double amax = 0.0, bmax = 0.0;
  for (const auto& t : r.K.triplets()) {
    if (t.row < nf && t.col < nf)
      amax = std::max(amax, std::abs(t.value));
    else
      bmax = std::max(bmax, std::abs(t.value));
  }
  const double scale = amax > 0.0 && bmax > 0.0 ? amax / bmax : 1.0;
  std::vector<double> d(n, 1.0);
  for (int i = nf; i < n; ++i) d[i] = scale;
  std::vector<Triplet> trip = r.K.triplets();
  for (auto& t : trip) t.value *= d[t.row] * d[t.col];
  const SparseMatrix Ks = SparseMatrix::from_triplets(n, n, std::move(trip));
  std::vector<double> bs(n);
  for (int i = 0; i < n; ++i) bs[i] = d[i] * r.rhs[i];
  std::vector<double> x;
  try {
    const BandLU lu(Ks);
    x = lu.solve(bs);
    for (int it = 0; it < refinement_steps; ++it) {
      auto res = Ks.multiply(x);
      for (int i = 0; i < n; ++i) res[i] = bs[i] - res[i];
      const auto dx = lu.solve(res);
      for (int i = 0; i < n; ++i) x[i] += dx[i];
    }
  } catch (const SingularMatrixError& e) {
    const std::ptrdiff_t idx = e.index();
    if (idx >= nf) {
      const int m = static_cast<int>(idx - nf);
      const int l = s.dofs.interface_of_multiplier(m);
      std::ostringstream os;
      os << "multiplier rows of interface " << l << " are linearly dependent (multiplier " << m << ")";
      throw SingularConstraintError(os.str(), m, l);
    }
    std::ostringstream os;
    os << "singular primal block at dof " << r.free[idx];
    throw SingularMatrixError(os.str(), r.free[idx]);
  }
  for (int i = 0; i < n; ++i) x[i] *= d[i];
  Solution sol;
  sol.u = s.fixed_value;
  for (int i = 0; i < nf; ++i) sol.u[r.free[i]] = x[i];
  sol.lambda.assign(x.begin() + nf, x.end());
  const auto Kx = r.K.multiply(x);
  for (std::size_t i = 0; i < Kx.size(); ++i) sol.residual = std::max(sol.residual, std::abs(Kx[i] - r.rhs[i]));
  sol.constraint_residual = max_abs(s.B.multiply(sol.u));
  return sol;
}

/// Value and physical gradient of the discrete field (component c) of patch k at zeta.
inline std::pair<double, Vec2> evaluate_field(const Discretization& d, const std::vector<double>& u,
                                              int k, int c, const Vec2& zeta) {
  const auto& S = d.spaces[k];
  const auto b1 = eval_basis(S.knots(0), zeta[0], 1);
  const auto b2 = eval_basis(S.knots(1), zeta[1], 1);
  double v = 0.0;
  Vec2 gz{0.0, 0.0};
  for (int a = 0; a <= S.degree(0); ++a)
    for (int b = 0; b <= S.degree(1); ++b) {
      const double coef = u[d.dofs.primal(k, c, S.index(b1.first() + a, b2.first() + b))];
      v += coef * b1(0, a) * b2(0, b);
      gz[0] += coef * b1(1, a) * b2(0, b);
      gz[1] += coef * b1(0, a) * b2(1, b);
    }
  const Mat2 J = d.domain.patches[k].evaluate(zeta).jac;
  return {v, J.inverse().transpose() * gz};
}

}  // namespace igamortar
