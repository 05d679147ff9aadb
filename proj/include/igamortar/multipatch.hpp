#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "igamortar/nurbs_patch.hpp"

namespace igamortar {

using ScalarField = std::function<double(const Vec2&)>;
using VectorField = std::function<Vec2(const Vec2&)>;

inline ScalarField constant_field(double c) {
  return [c](const Vec2&) { return c; };
}

struct Interface {
  int master = -1;
  int slave = -1;
  Face master_face = Face::South;
  Face slave_face = Face::South;
  /// True when the slave face coordinate runs opposite to the master one.
  bool reversed = false;
};

enum class BoundaryKind { Dirichlet, Neumann };

struct BoundaryCondition {
  int patch = -1;
  Face face = Face::South;
  BoundaryKind kind = BoundaryKind::Dirichlet;
  /// Constrained displacement components for vector problems; ignored for scalar ones.
  std::array<bool, 2> components{true, true};
};

/// Diffusion coefficient alpha, reaction coefficient beta and the Lame pair of one patch.
struct PatchCoefficients {
  ScalarField alpha = constant_field(1.0);
  ScalarField beta = constant_field(0.0);
  double lambda = 0.0;
  double mu = 0.0;
};

class MultipatchDomain {
 public:
  std::vector<NurbsPatch> patches;
  std::vector<Interface> interfaces;
  std::vector<BoundaryCondition> boundary;
  std::vector<PatchCoefficients> coefficients;
  /// Largest admissible distance between slave-face points and the master face.
  double gap_tolerance = 1e-8;

  int num_patches() const { return static_cast<int>(patches.size()); }
  int num_interfaces() const { return static_cast<int>(interfaces.size()); }

  const PatchCoefficients& coeffs(int k) const {
    static const PatchCoefficients kDefault{};
    return k < static_cast<int>(coefficients.size()) ? coefficients[k] : kDefault;
  }

  std::optional<BoundaryCondition> condition(int patch, Face face) const {
    std::optional<BoundaryCondition> out;
    for (const auto& bc : boundary) {
      if (bc.patch != patch || bc.face != face) continue;
      if (out && out->kind != bc.kind) {
        std::ostringstream os;
        os << "patch " << patch << " " << to_string(face) << " carries conflicting boundary tags";
        throw InputError(os.str());
      }
      if (out) {
        for (int c = 0; c < 2; ++c) out->components[c] = out->components[c] || bc.components[c];
      } else {
        out = bc;
      }
    }
    return out;
  }

  bool is_dirichlet(int patch, Face face) const {
    auto bc = condition(patch, face);
    return bc && bc->kind == BoundaryKind::Dirichlet;
  }

  /// Interface id of the face, or -1.
  int interface_on(int patch, Face face) const {
    for (int l = 0; l < num_interfaces(); ++l) {
      const auto& g = interfaces[l];
      if ((g.master == patch && g.master_face == face) || (g.slave == patch && g.slave_face == face))
        return l;
    }
    return -1;
  }

  /// Cross-point flags for the start (t=0) and end (t=1) of the slave face: an end is a
  /// cross point if it touches the Dirichlet boundary or another interface, seen from
  /// either side.
  std::pair<bool, bool> cross_points(int l) const {
    const auto& g = interfaces[l];
    auto touches = [&](int patch, Face face, bool at_end) {
      const Face adj = adjacent_face(face, at_end);
      return is_dirichlet(patch, adj) || interface_on(patch, adj) >= 0;
    };
    std::array<bool, 2> flags{};
    for (int e = 0; e < 2; ++e) {
      const bool at_end = e == 1;
      flags[e] = touches(g.slave, g.slave_face, at_end);
      const Vec2 x = map_point(patches[g.slave], face_point(g.slave_face, at_end ? 1.0 : 0.0));
      for (int me = 0; me < 2; ++me) {
        const Vec2 y = map_point(patches[g.master], face_point(g.master_face, me == 1 ? 1.0 : 0.0));
        if (norm(x - y) <= std::max(gap_tolerance, 1e-8) && touches(g.master, g.master_face, me == 1))
          flags[e] = true;
      }
    }
    return {flags[0], flags[1]};
  }

  /// Largest distance from sampled slave-face points to the master face.
  double interface_gap(int l, int samples = 20) const {
    const auto& g = interfaces[l];
    double gap = 0.0;
    for (int s = 0; s <= samples; ++s) {
      const Vec2 x = map_point(patches[g.slave], face_point(g.slave_face, double(s) / samples));
      gap = std::max(gap, invert_point(patches[g.master], x, g.master_face).residual);
    }
    return gap;
  }

  /// Checks topology and geometry; fills the orientation flags of the interfaces.
  void validate() {
    const int np = num_patches();
    if (np == 0) throw InputError("domain has no patches");
    for (int k = 0; k < np; ++k) check_patch_regularity(k);
    for (const auto& bc : boundary) {
      if (bc.patch < 0 || bc.patch >= np) throw InputError("boundary tag references a missing patch");
      condition(bc.patch, bc.face);
    }
    for (int l = 0; l < num_interfaces(); ++l) {
      auto& g = interfaces[l];
      std::ostringstream id;
      id << "interface " << l;
      if (g.master < 0 || g.master >= np || g.slave < 0 || g.slave >= np)
        throw InputError(id.str() + " references a missing patch");
      if (g.master == g.slave) throw InputError(id.str() + " joins a patch to itself");
      for (auto [p, f] : {std::pair{g.master, g.master_face}, std::pair{g.slave, g.slave_face}}) {
        if (condition(p, f)) {
          std::ostringstream os;
          os << id.str() << ": patch " << p << " " << to_string(f)
             << " also carries a boundary tag";
          throw InputError(os.str());
        }
        for (int o = 0; o < num_interfaces(); ++o) {
          if (o == l) continue;
          const auto& h = interfaces[o];
          if ((h.master == p && h.master_face == f) || (h.slave == p && h.slave_face == f)) {
            std::ostringstream os;
            os << id.str() << " and interface " << o << " share patch " << p << " " << to_string(f);
            throw InputError(os.str());
          }
        }
      }
      const double gap = interface_gap(l);
      if (gap > gap_tolerance) {
        std::ostringstream os;
        os << id.str() << ": slave face lies " << gap << " away from the master face";
        throw GeometryError(os.str());
      }
      const Vec2 s0 = map_point(patches[g.slave], face_point(g.slave_face, 0.0));
      const double t0 = invert_point(patches[g.master], s0, g.master_face).zeta[face_direction(g.master_face)];
      const Vec2 s1 = map_point(patches[g.slave], face_point(g.slave_face, 1.0));
      const double t1 = invert_point(patches[g.master], s1, g.master_face).zeta[face_direction(g.master_face)];
      g.reversed = t1 < t0;
    }
  }

 private:
  void check_patch_regularity(int k) const {
    const auto& P = patches[k];
    constexpr int kSamples = 12;
    int sign = 0;
    for (int a = 0; a <= kSamples; ++a) {
      for (int b = 0; b <= kSamples; ++b) {
        const Vec2 z{(a + 0.5) / (kSamples + 1), (b + 0.5) / (kSamples + 1)};
        const PatchPoint pp = P.evaluate(z);
        const double det = pp.jac.det();
        if (!(pp.weight > 0.0)) {
          std::ostringstream os;
          os << "patch " << k << ": nonpositive weight function";
          throw GeometryError(os.str());
        }
        const int s = std::abs(det) <= kSingularJacobian ? 0 : (det > 0 ? 1 : -1);
        if (s == 0 || (sign != 0 && s != sign)) {
          std::ostringstream os;
          os << "patch " << k << ": Jacobian degenerates or changes sign near (" << z[0] << ", "
             << z[1] << ")";
          throw GeometryError(os.str());
        }
        sign = s;
      }
    }
  }
};

}  // namespace igamortar
