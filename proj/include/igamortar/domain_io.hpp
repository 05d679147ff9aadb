#pragma once

// JSON domain files: patches, interfaces, boundary tags, coefficients and the
// manufactured solution that drives the data.

#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "igamortar/studies.hpp"

namespace igamortar {

using json = nlohmann::json;

namespace detail {

inline double number_or(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw InputError(std::string("field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

inline const json& required(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw InputError(where + ": missing field '" + key + "'");
  return j.at(key);
}

inline KnotVector knots_from_json(int degree, const json& j) {
  if (!j.is_array()) throw InputError("knot vector must be an array");
  std::vector<double> U;
  for (const auto& v : j) {
    if (!v.is_number()) throw InputError("knot values must be numbers");
    U.push_back(v.get<double>());
  }
  try {
    return KnotVector(degree, U);
  } catch (const Error& e) {
    throw InputError(std::string("invalid knot vector: ") + e.what());
  }
}

inline NurbsPatch patch_from_json(const json& j, int k) {
  const std::string where = "patch " + std::to_string(k);
  const json& deg = required(j, "degrees", where);
  const json& knots = required(j, "knots", where);
  if (!deg.is_array() || deg.size() != 2 || !knots.is_array() || knots.size() != 2)
    throw InputError(where + ": 'degrees' and 'knots' need two entries");
  const KnotVector k1 = knots_from_json(deg[0].get<int>(), knots[0]);
  const KnotVector k2 = knots_from_json(deg[1].get<int>(), knots[1]);
  const json& flat = required(j, "control_points", where);
  if (!flat.is_array() || flat.size() % 2 != 0)
    throw InputError(where + ": 'control_points' must be a flat array of x, y pairs");
  std::vector<Vec2> cps;
  for (std::size_t i = 0; i < flat.size(); i += 2) cps.push_back({flat[i].get<double>(), flat[i + 1].get<double>()});
  std::vector<double> ws;
  if (j.contains("weights")) ws = j.at("weights").get<std::vector<double>>();
  try {
    return NurbsPatch(k1, k2, cps, ws);
  } catch (const PreconditionError& e) {
    throw InputError(where + ": " + e.what());
  }
}

inline ScalarExact scalar_exact_from_json(const json& j) {
  const std::string name = required(j, "name", "exact").get<std::string>();
  if (name == "sine_product")
    return sine_product(number_or(j, "a", std::numbers::pi), number_or(j, "b", std::numbers::pi));
  if (name == "corner_singularity") return corner_singularity();
  if (name == "linear") return linear_field(number_or(j, "c0", 0.0), number_or(j, "c1", 0.0), number_or(j, "c2", 0.0));
  throw InputError("unknown scalar field '" + name + "'");
}

inline ScalarField field_from_json(const json& j) {
  if (j.is_number()) return constant_field(j.get<double>());
  if (j.is_object()) return scalar_exact_from_json(j).u;
  throw InputError("coefficient must be a number or a named field");
}

inline PatchCoefficients coefficients_from_json(const json& j) {
  PatchCoefficients c;
  if (j.contains("alpha")) c.alpha = field_from_json(j.at("alpha"));
  if (j.contains("beta")) c.beta = field_from_json(j.at("beta"));
  if (j.contains("youngs") || j.contains("poisson")) {
    const double E = number_or(j, "youngs", 1.0), nu = number_or(j, "poisson", 0.3);
    c.lambda = lame_lambda(E, nu);
    c.mu = lame_mu(E, nu);
  }
  c.lambda = number_or(j, "lambda", c.lambda);
  c.mu = number_or(j, "mu", c.mu);
  return c;
}

inline BoundaryCondition boundary_from_json(const json& j) {
  BoundaryCondition bc;
  bc.patch = required(j, "patch", "boundary tag").get<int>();
  bc.face = parse_face(required(j, "face", "boundary tag").get<std::string>());
  const std::string kind = required(j, "kind", "boundary tag").get<std::string>();
  if (kind == "dirichlet")
    bc.kind = BoundaryKind::Dirichlet;
  else if (kind == "neumann")
    bc.kind = BoundaryKind::Neumann;
  else
    throw InputError("unknown boundary kind '" + kind + "'");
  if (j.contains("components")) {
    bc.components = {false, false};
    for (const auto& c : j.at("components")) {
      const std::string s = c.get<std::string>();
      if (s == "x")
        bc.components[0] = true;
      else if (s == "y")
        bc.components[1] = true;
      else
        throw InputError("unknown displacement component '" + s + "'");
    }
  }
  return bc;
}

}  // namespace detail

/// Parses and validates the domain part of a problem file.
inline MultipatchDomain domain_from_json(const json& j) {
  try {
    MultipatchDomain d;
    const json& patches = detail::required(j, "patches", "domain");
    if (!patches.is_array()) throw InputError("'patches' must be an array");
    for (std::size_t k = 0; k < patches.size(); ++k)
      d.patches.push_back(detail::patch_from_json(patches[k], static_cast<int>(k)));
    if (j.contains("interfaces"))
      for (const auto& g : j.at("interfaces")) {
        Interface itf;
        itf.master = detail::required(g, "master", "interface").get<int>();
        itf.slave = detail::required(g, "slave", "interface").get<int>();
        itf.master_face = parse_face(detail::required(g, "master_face", "interface").get<std::string>());
        itf.slave_face = parse_face(detail::required(g, "slave_face", "interface").get<std::string>());
        d.interfaces.push_back(itf);
      }
    if (j.contains("boundary"))
      for (const auto& b : j.at("boundary")) d.boundary.push_back(detail::boundary_from_json(b));
    d.coefficients.assign(d.patches.size(), PatchCoefficients{});
    if (j.contains("coefficients")) {
      const json& c = j.at("coefficients");
      if (c.is_array()) {
        if (c.size() != d.patches.size()) throw InputError("need one coefficient entry per patch");
        for (std::size_t k = 0; k < c.size(); ++k) d.coefficients[k] = detail::coefficients_from_json(c[k]);
      } else {
        for (auto& co : d.coefficients) co = detail::coefficients_from_json(c);
      }
    }
    d.gap_tolerance = detail::number_or(j, "gap_tolerance", d.gap_tolerance);
    d.validate();
    return d;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed domain file: ") + e.what());
  }
}

/// A problem file as a manufactured case: the domain is refined uniformly `level` times.
inline ManufacturedCase case_from_json(const json& j) {
  try {
    ManufacturedCase mc;
    mc.name = j.value("name", std::string("file"));
    const std::string kind = j.value("problem", std::string("scalar"));
    const json& ex = detail::required(j, "exact", "problem file");
    if (kind == "scalar") {
      mc.kind = ProblemKind::Scalar;
      mc.scalar = detail::scalar_exact_from_json(ex);
    } else if (kind == "elasticity") {
      mc.kind = ProblemKind::Elasticity;
      const std::string name = detail::required(ex, "name", "exact").get<std::string>();
      if (name != "kirsch") throw InputError("unknown elastic field '" + name + "'");
      mc.elastic = kirsch(detail::number_or(ex, "radius", 0.2), detail::number_or(ex, "traction", 10.0),
                          detail::number_or(ex, "youngs", 1e5), detail::number_or(ex, "poisson", 0.3));
    } else {
      throw InputError("unknown problem kind '" + kind + "'");
    }
    const MultipatchDomain d = domain_from_json(j);
    mc.domain = [d](int) { return d; };
    if (j.contains("extra_refine")) mc.extra_refine = j.at("extra_refine").get<std::vector<int>>();
    const int base = j.value("base_refine", 0);
    mc.refine = [base](int level) { return level + base; };
    return mc;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed problem file: ") + e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline ManufacturedCase load_case(const std::string& path) { return case_from_json(read_json_file(path)); }

/// Serializes geometry, topology and the Lame pair; alpha and beta are written as their
/// values at the patch centre.
inline json to_json(const MultipatchDomain& d) {
  json j;
  j["patches"] = json::array();
  for (int k = 0; k < d.num_patches(); ++k) {
    const auto& P = d.patches[k];
    json p;
    p["degrees"] = {P.degree(0), P.degree(1)};
    p["knots"] = {P.knots(0).knots(), P.knots(1).knots()};
    std::vector<double> flat;
    for (const auto& c : P.control_points()) flat.insert(flat.end(), {c[0], c[1]});
    p["control_points"] = flat;
    p["weights"] = P.weights();
    j["patches"].push_back(p);
  }
  j["interfaces"] = json::array();
  for (const auto& g : d.interfaces)
    j["interfaces"].push_back({{"master", g.master},
                               {"slave", g.slave},
                               {"master_face", std::string(to_string(g.master_face))},
                               {"slave_face", std::string(to_string(g.slave_face))}});
  j["boundary"] = json::array();
  for (const auto& bc : d.boundary) {
    json b{{"patch", bc.patch},
           {"face", std::string(to_string(bc.face))},
           {"kind", bc.kind == BoundaryKind::Dirichlet ? "dirichlet" : "neumann"}};
    if (!(bc.components[0] && bc.components[1])) {
      json comps = json::array();
      if (bc.components[0]) comps.push_back("x");
      if (bc.components[1]) comps.push_back("y");
      b["components"] = comps;
    }
    j["boundary"].push_back(b);
  }
  j["coefficients"] = json::array();
  for (int k = 0; k < d.num_patches(); ++k) {
    const auto& co = d.coeffs(k);
    const Vec2 centre = map_point(d.patches[k], {0.5, 0.5});
    j["coefficients"].push_back(
        {{"alpha", co.alpha(centre)}, {"beta", co.beta(centre)}, {"lambda", co.lambda}, {"mu", co.mu}});
  }
  j["gap_tolerance"] = d.gap_tolerance;
  return j;
}

}  // namespace igamortar
