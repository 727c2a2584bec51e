// Copyright The smallscat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "smallscat/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "smallscat/bem_oracle.hpp"
#include "smallscat/effective_medium.hpp"
#include "smallscat/geometry.hpp"
#include "smallscat/many_body.hpp"
#include "smallscat/one_body.hpp"
#include "smallscat/potential_ops.hpp"
#include "smallscat/shape_functionals.hpp"

namespace smallscat
{

const char *const version_string = SMALLSCAT_VERSION;

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string Table::to_csv() const
{
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c)
  {
    out += c ? "," : "";
    out += header[c];
  }
  out += '\n';
  char buf[40];
  for (const auto &row : rows)
  {
    for (std::size_t c = 0; c < row.size(); ++c)
    {
      std::snprintf(buf, sizeof buf, "%.17g", row[c]);
      out += c ? "," : "";
      out += buf;
    }
    out += '\n';
  }
  return out;
}

Table Table::from_csv(const std::string &text, const std::string &origin)
{
  Table t;
  std::istringstream in(text);
  std::string line;
  auto split = [](const std::string &s) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream ls(s);
    while (std::getline(ls, cur, ','))
      parts.push_back(cur);
    return parts;
  };
  if (!std::getline(in, line) || line.empty())
  {
    throw ValidationError("csv_parse", origin + ": missing header row");
  }
  t.header = split(line);
  std::size_t lineno = 1;
  while (std::getline(in, line))
  {
    ++lineno;
    if (line.empty())
      continue;
    const auto parts = split(line);
    if (parts.size() != t.header.size())
    {
      throw ValidationError("csv_parse", origin + ": line " + std::to_string(lineno) +
                                             " has the wrong number of fields");
    }
    std::vector<double> row;
    for (const auto &p : parts)
    {
      char *end = nullptr;
      const double v = std::strtod(p.c_str(), &end);
      if (end == p.c_str() || *end != '\0')
      {
        throw ValidationError("csv_parse", origin + ": line " + std::to_string(lineno) +
                                               ": '" + p + "' is not a number");
      }
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

const std::vector<std::string> &scenario_modes()
{
  static const std::vector<std::string> modes = {"shape",     "one-body", "oracle",
                                                 "many-body", "effective", "design",
                                                 "background-green"};
  return modes;
}

namespace
{

[[noreturn]] void bad(const std::string &path, const std::string &message)
{
  throw ValidationError("invalid_scenario", path + ": " + message);
}

std::string join(const std::string &path, const std::string &key)
{
  return path.empty() ? key : path + "." + key;
}

// Returns obj[key], inserting `fallback` first when the key is absent (so that the scenario
// object ends up fully resolved).
json &entry(json &obj, const std::string &key, const std::string &path, const json &fallback)
{
  if (!obj.is_object())
    bad(path, "expected an object");
  if (!obj.contains(key))
  {
    if (fallback.is_null())
      bad(join(path, key), "required key is missing");
    obj[key] = fallback;
  }
  return obj[key];
}

double as_double(const json &v, const std::string &path)
{
  if (!v.is_number())
    bad(path, "expected a number");
  return v.get<double>();
}

double get_double(json &obj, const std::string &key, const std::string &path,
                  const json &fallback = nullptr)
{
  return as_double(entry(obj, key, path, fallback), join(path, key));
}

int get_int(json &obj, const std::string &key, const std::string &path,
            const json &fallback = nullptr)
{
  const json &v = entry(obj, key, path, fallback);
  if (!v.is_number_integer())
    bad(join(path, key), "expected an integer");
  return v.get<int>();
}

bool get_bool(json &obj, const std::string &key, const std::string &path, bool fallback)
{
  const json &v = entry(obj, key, path, fallback);
  if (!v.is_boolean())
    bad(join(path, key), "expected true or false");
  return v.get<bool>();
}

std::string get_string(json &obj, const std::string &key, const std::string &path,
                       const json &fallback = nullptr)
{
  const json &v = entry(obj, key, path, fallback);
  if (!v.is_string())
    bad(join(path, key), "expected a string");
  return v.get<std::string>();
}

complex as_complex(const json &v, const std::string &path)
{
  if (v.is_number())
    return v.get<double>();
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  if (v.is_string())
  {
    const Expression e(v.get<std::string>());
    if (!e.is_constant())
      bad(path, "expected a constant, got an expression in x, y, z");
    return e(Vec3::Zero());
  }
  bad(path, "expected a number, [re, im] or a constant expression string");
}

complex get_complex(json &obj, const std::string &key, const std::string &path,
                    const json &fallback = nullptr)
{
  return as_complex(entry(obj, key, path, fallback), join(path, key));
}

Vec3 as_vec3(const json &v, const std::string &path)
{
  if (!v.is_array() || v.size() != 3)
    bad(path, "expected an array of three numbers");
  Vec3 out;
  for (int i = 0; i < 3; ++i)
    out[i] = as_double(v[i], path);
  return out;
}

Vec3 get_vec3(json &obj, const std::string &key, const std::string &path,
              const json &fallback = nullptr)
{
  return as_vec3(entry(obj, key, path, fallback), join(path, key));
}

json vec_json(const Vec3 &v) { return json::array({v.x(), v.y(), v.z()}); }
json complex_json(complex z) { return json::array({z.real(), z.imag()}); }

Box get_box(json &obj, const std::string &key, const std::string &path)
{
  json &b = entry(obj, key, path, json{{"lo", {0.0, 0.0, 0.0}}, {"hi", {1.0, 1.0, 1.0}}});
  const std::string p = join(path, key);
  Box box{get_vec3(b, "lo", p), get_vec3(b, "hi", p)};
  if (!((box.hi.array() > box.lo.array()).all()))
    bad(p, "hi must exceed lo on every axis");
  return box;
}

ScalarField as_field(const json &v, const std::string &path)
{
  if (v.is_number() || v.is_array())
    return ScalarField(as_complex(v, path));
  if (v.is_string())
    return ScalarField::from_string(v.get<std::string>());
  if (v.is_object() && v.contains("grid"))
  {
    json g = v["grid"];
    const std::string p = join(path, "grid");
    const Box box = get_box(g, "box", p);
    const json &n = entry(g, "nodes", p, nullptr);
    if (!n.is_array() || n.size() != 3)
      bad(join(p, "nodes"), "expected three node counts");
    const std::array<int, 3> nodes{n[0].get<int>(), n[1].get<int>(), n[2].get<int>()};
    const json &vals = entry(g, "values", p, nullptr);
    if (!vals.is_array())
      bad(join(p, "values"), "expected an array");
    std::vector<complex> samples;
    for (const auto &x : vals)
      samples.push_back(as_complex(x, join(p, "values")));
    return ScalarField::from_grid(box, nodes, std::move(samples));
  }
  bad(path, "expected a number, [re, im], an expression string or {\"grid\": ...}");
}

ScalarField get_field(json &obj, const std::string &key, const std::string &path,
                      const json &fallback = nullptr)
{
  return as_field(entry(obj, key, path, fallback), join(path, key));
}

TensorField get_tensor(json &obj, const std::string &key, const std::string &path)
{
  const json &v = entry(obj, key, path, 0.0);
  const std::string p = join(path, key);
  TensorField t;
  if (v.is_number())
  {
    t = TensorField(CMat3::Identity() * v.get<double>());
    return t;
  }
  if (!v.is_array() || v.size() != 9)
    bad(p, "expected a number (multiple of identity) or nine row-major entries");
  for (int i = 0; i < 9; ++i)
    t.entries[i] = as_field(v[i], p);
  return t;
}

IncidentField parse_one_incident(const json &v, double k, const std::string &path)
{
  if (!v.is_object())
    bad(path, "expected an object");
  const std::string type = v.value("type", "plane");
  if (type == "plane")
  {
    if (!v.contains("direction"))
      bad(path, "plane wave needs a direction");
    const complex amp = v.contains("amplitude") ? as_complex(v["amplitude"], join(path, "amplitude"))
                                                : complex(1.0);
    return IncidentField::plane_wave(as_vec3(v["direction"], join(path, "direction")), k, amp);
  }
  if (type == "custom")
  {
    if (!v.contains("value") || !v.contains("gradient") || !v.contains("laplacian"))
      bad(path, "custom field needs value, gradient and laplacian expressions");
    const ScalarField value = as_field(v["value"], join(path, "value"));
    const json &g = v["gradient"];
    if (!g.is_array() || g.size() != 3)
      bad(join(path, "gradient"), "expected three expressions");
    const std::array<ScalarField, 3> grad{as_field(g[0], path), as_field(g[1], path),
                                          as_field(g[2], path)};
    const ScalarField lap = as_field(v["laplacian"], join(path, "laplacian"));
    return IncidentField::custom([value](const Vec3 &x) { return value(x); },
                                 [grad](const Vec3 &x) -> CVec3 {
                                   return CVec3(grad[0](x), grad[1](x), grad[2](x));
                                 },
                                 [lap](const Vec3 &x) { return lap(x); });
  }
  bad(join(path, "type"), "unknown incident type '" + type + "'");
}

IncidentField get_incident(json &s, double k)
{
  json &v = entry(s, "incident", "", json{{"type", "plane"}, {"direction", {0.0, 0.0, 1.0}},
                                          {"amplitude", 1.0}});
  if (v.is_array())
  {
    if (v.empty())
      bad("incident", "expected at least one field");
    IncidentField f = parse_one_incident(v[0], k, "incident[0]");
    for (std::size_t i = 1; i < v.size(); ++i)
      f = f + parse_one_incident(v[i], k, "incident[" + std::to_string(i) + "]");
    return f;
  }
  return parse_one_incident(v, k, "incident");
}

Vec3 forward_direction(const IncidentField &f)
{
  return f.plane_waves().empty() ? Vec3(0, 0, 1) : f.plane_waves().front().direction;
}

SurfaceMesh parse_geometry(json &g, const std::string &path, const std::string &base_dir)
{
  const std::string type = get_string(g, "type", path, "sphere");
  const Vec3 center = get_vec3(g, "center", path, json::array({0.0, 0.0, 0.0}));
  if (type == "sphere")
  {
    return make_sphere_mesh(get_double(g, "radius", path, 1.0),
                            get_int(g, "refinement", path, 3), center);
  }
  if (type == "ellipsoid")
  {
    return make_ellipsoid_mesh(get_vec3(g, "semi_axes", path), get_int(g, "refinement", path, 3),
                               center);
  }
  if (type == "cube")
  {
    return make_cube_mesh(get_double(g, "edge", path, 1.0), get_int(g, "subdivisions", path, 8),
                          center);
  }
  if (type == "file")
  {
    fs::path file = get_string(g, "path", path);
    if (file.is_relative())
      file = fs::path(base_dir) / file;
    return read_mesh_file(file.string()).translated(center);
  }
  bad(join(path, "type"), "unknown geometry type '" + type + "'");
}

std::vector<Vec3> parse_probes(json &s, const std::string &key)
{
  if (!s.contains(key))
    return {};
  json &v = s[key];
  std::vector<Vec3> out;
  if (v.is_array())
  {
    for (std::size_t i = 0; i < v.size(); ++i)
      out.push_back(as_vec3(v[i], key + "[" + std::to_string(i) + "]"));
    return out;
  }
  if (v.is_object() && v.contains("ring"))
  {
    json &r = v["ring"];
    const std::string p = key + ".ring";
    const Vec3 c = get_vec3(r, "center", p);
    const double radius = get_double(r, "radius", p);
    const int count = get_int(r, "count", p, 8);
    const Vec3 axis = get_vec3(r, "axis", p, json::array({0.0, 0.0, 1.0})).normalized();
    Vec3 u = axis.unitOrthogonal();
    const Vec3 w = axis.cross(u);
    for (int i = 0; i < count; ++i)
    {
      const double t = 2.0 * pi * i / count;
      out.push_back(c + radius * (std::cos(t) * u + std::sin(t) * w));
    }
    return out;
  }
  if (v.is_object() && v.contains("line"))
  {
    json &l = v["line"];
    const std::string p = key + ".line";
    const Vec3 a = get_vec3(l, "from", p), b = get_vec3(l, "to", p);
    const int count = get_int(l, "count", p, 11);
    if (count < 2)
      bad(join(p, "count"), "needs at least two points");
    for (int i = 0; i < count; ++i)
      out.push_back(a + (b - a) * (double(i) / (count - 1)));
    return out;
  }
  bad(key, "expected a list of points, {\"ring\": ...} or {\"line\": ...}");
}

struct Direction
{
  double theta, phi;
  Vec3 beta;
};

std::vector<Direction> parse_directions(json &s)
{
  json &d = entry(s, "directions", "", json{{"n_theta", 13}, {"n_phi", 1}});
  const int nt = get_int(d, "n_theta", "directions", 13);
  const int np = get_int(d, "n_phi", "directions", 1);
  if (nt < 1 || np < 1 || nt * np > 100000)
    bad("directions", "n_theta and n_phi must be positive and modest");
  std::vector<Direction> out;
  for (int j = 0; j < np; ++j)
  {
    const double phi = 2.0 * pi * j / np;
    for (int i = 0; i < nt; ++i)
    {
      const double theta = nt == 1 ? 0.0 : pi * i / (nt - 1);
      out.push_back({theta, phi,
                     Vec3(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                          std::cos(theta))});
    }
  }
  return out;
}

template <class F>
Table amplitude_table(const std::vector<Direction> &dirs, F amplitude)
{
  Table t{{"theta", "phi", "re_A", "im_A"}, {}};
  for (const auto &d : dirs)
  {
    const complex a = amplitude(d.beta);
    t.rows.push_back({d.theta, d.phi, a.real(), a.imag()});
  }
  return t;
}

Table field_table(const std::vector<Vec3> &points, const std::vector<complex> &u,
                  const IncidentField &incident)
{
  Table t{{"x", "y", "z", "re_u", "im_u", "re_u0", "im_u0"}, {}};
  for (std::size_t i = 0; i < points.size(); ++i)
  {
    const complex u0 = incident.value(points[i]);
    t.rows.push_back({points[i].x(), points[i].y(), points[i].z(), u[i].real(), u[i].imag(),
                      u0.real(), u0.imag()});
  }
  return t;
}

void add_file(RunResult &r, const std::string &name, const std::string &content)
{
  r.files.push_back({name, content});
}

// ---------------------------------------------------------------------------- modes

void run_shape(json &s, RunResult &r, const std::string &base)
{
  json &g = entry(s, "geometry", "", json::object());
  const SurfaceMesh mesh = parse_geometry(g, "geometry", base);
  const double lambda = get_double(s, "lambda", "", 1.0);
  const Mat3 beta = polarizability_tensor(mesh, lambda);
  const CVec3 q = charge_Q_sigma_q(mesh, lambda);
  json rec;
  rec["capacitance_zeroth"] = capacitance_zeroth(mesh);
  rec["capacitance_bem"] = capacitance_bem(mesh);
  rec["lambda"] = lambda;
  rec["polarizability"] = json::array();
  for (int i = 0; i < 3; ++i)
    rec["polarizability"].push_back(vec_json(beta.row(i).transpose()));
  rec["charge_sigma_q"] = json::array({complex_json(q[0]), complex_json(q[1]), complex_json(q[2])});
  rec["volume"] = mesh.volume();
  rec["area"] = mesh.area();
  rec["size"] = mesh.size();
  rec["panels"] = mesh.panel_count();
  add_file(r, "shape.json", rec.dump(2) + "\n");
  r.manifest["results"] = rec;
  r.summary = rec.dump(2);
}

struct BodyParameters
{
  BoundaryCondition bc;
  complex zeta = 0.0;
  double rho = 1.0, k1 = 1.0;
};

BodyParameters parse_body_parameters(json &s, double size)
{
  BodyParameters p;
  p.bc = boundary_condition_from_string(get_string(s, "bc", "", "dirichlet"));
  if (p.bc == BoundaryCondition::impedance)
  {
    if (s.contains("h"))
    {
      const complex h = get_complex(s, "h", "");
      const double kappa = get_double(s, "kappa", "", 0.5);
      if (!(kappa > 0.0 && kappa < 1.0))
        throw ValidationError("constraint_violation", "kappa must lie in (0, 1)");
      p.zeta = h / std::pow(size, kappa);
    }
    else
    {
      p.zeta = get_complex(s, "zeta", "", 1.0);
    }
    if (p.zeta.imag() > 0.0)
      throw ValidationError("constraint_violation", "impedance must satisfy Im zeta <= 0");
  }
  if (p.bc == BoundaryCondition::transmission)
  {
    p.rho = get_double(s, "rho", "");
    p.k1 = get_double(s, "k_interior", "");
    transmission_lambda(p.rho);
    if (!(p.k1 > 0.0))
      throw ValidationError("constraint_violation", "interior wavenumber must be positive");
  }
  return p;
}

void run_one_body(json &s, RunResult &r, const std::string &base)
{
  const double k = get_double(s, "k", "");
  const IncidentField incident = get_incident(s, k);
  json &g = entry(s, "geometry", "", json::object());
  const SurfaceMesh mesh = parse_geometry(g, "geometry", base);
  const BodyParameters p = parse_body_parameters(s, mesh.size());
  const auto dirs = parse_directions(s);
  const auto probes = parse_probes(s, "probes");

  const Vec3 center = mesh.barycenter();
  const double size = mesh.size();
  OneBodyResult res;
  json params;
  switch (p.bc)
  {
    case BoundaryCondition::dirichlet:
    {
      const std::string method = get_string(s, "capacitance", "", "bem");
      double c;
      if (method == "bem")
        c = capacitance_bem(mesh);
      else if (method == "zeroth")
        c = capacitance_zeroth(mesh);
      else
        bad("capacitance", "expected \"bem\" or \"zeroth\"");
      res = one_body_dirichlet(c, k, incident, center, size);
      params["capacitance"] = c;
      break;
    }
    case BoundaryCondition::impedance:
      res = one_body_impedance(p.zeta, mesh.area(), k, incident, center, size);
      params["zeta"] = complex_json(p.zeta);
      params["area"] = mesh.area();
      break;
    case BoundaryCondition::neumann:
    {
      const Mat3 beta = polarizability_tensor(mesh, 1.0);
      res = one_body_neumann(mesh.volume(), beta, k, incident, center, size);
      params["volume"] = mesh.volume();
      break;
    }
    case BoundaryCondition::transmission:
    {
      const ShapeFunctionals f = compute_shape_functionals(mesh, transmission_lambda(p.rho));
      res = one_body_transmission(f, p.rho, k, p.k1, incident, center, size);
      params["rho"] = p.rho;
      params["k_interior"] = p.k1;
      params["lambda"] = f.lambda;
      params["volume"] = f.volume;
      break;
    }
  }
  add_file(r, "amplitude.csv",
           amplitude_table(dirs, [&](const Vec3 &b) { return res.amplitude(b); }).to_csv());
  if (!probes.empty())
  {
    std::vector<complex> u;
    for (const auto &x : probes)
      u.push_back(scattered_field_one_body(res, x));
    add_file(r, "field.csv", field_table(probes, u, incident).to_csv());
  }
  json sum;
  sum["bc"] = to_string(p.bc);
  sum["a"] = size;
  sum["k"] = k;
  sum["Q"] = complex_json(res.charge);
  sum["Q1_forward"] = complex_json(res.far_field_moment(forward_direction(incident)));
  sum["dipole"] = json::array({complex_json(res.dipole[0]), complex_json(res.dipole[1]),
                               complex_json(res.dipole[2])});
  sum["volume_term"] = complex_json(res.volume_term);
  sum["params"] = params;
  add_file(r, "summary.json", sum.dump(2) + "\n");
  r.manifest["results"] = sum;
}

void run_oracle(json &s, RunResult &r, const std::string &base)
{
  const double k = get_double(s, "k", "");
  const IncidentField incident = get_incident(s, k);
  std::vector<SurfaceMesh> meshes;
  if (s.contains("bodies"))
  {
    json &b = s["bodies"];
    if (!b.is_array() || b.empty())
      bad("bodies", "expected a non-empty list of geometries");
    for (std::size_t i = 0; i < b.size(); ++i)
      meshes.push_back(parse_geometry(b[i], "bodies[" + std::to_string(i) + "]", base));
  }
  else
  {
    json &g = entry(s, "geometry", "", json::object());
    meshes.push_back(parse_geometry(g, "geometry", base));
  }
  double size = 0.0;
  for (const auto &m : meshes)
    size = std::max(size, m.size());
  const BodyParameters p = parse_body_parameters(s, size);
  BemOptions opts;
  opts.max_ka = get_double(s, "max_ka", "", 0.5);
  const auto dirs = parse_directions(s);
  const auto probes = parse_probes(s, "probes");

  BemSolution sol;
  switch (p.bc)
  {
    case BoundaryCondition::dirichlet:
      sol = solve_dirichlet_bem(meshes, k, incident, opts);
      break;
    case BoundaryCondition::impedance:
      sol = solve_impedance_bem(meshes, k, p.zeta, incident, opts);
      break;
    case BoundaryCondition::neumann:
      sol = solve_neumann_bem(meshes, k, incident, opts);
      break;
    case BoundaryCondition::transmission:
    {
      if (meshes.size() != 1)
        bad("bodies", "the transmission oracle handles one body");
      const int res = get_int(s, "volume_resolution", "", 14);
      sol = solve_transmission_bem(meshes[0], make_volume_grid(meshes[0], res), k, p.k1, p.rho,
                                   incident, opts);
      break;
    }
  }
  add_file(r, "amplitude.csv",
           amplitude_table(dirs, [&](const Vec3 &b) { return far_field(sol, b); }).to_csv());
  if (!probes.empty())
  {
    std::vector<complex> u(probes.size());
    const auto n = static_cast<long>(probes.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < n; ++i)
      u[i] = evaluate_bem_field(sol, probes[i]);
    add_file(r, "field.csv", field_table(probes, u, incident).to_csv());
  }
  json sum;
  sum["bc"] = to_string(p.bc);
  sum["a"] = size;
  sum["k"] = k;
  sum["bodies"] = meshes.size();
  sum["panels"] = sol.panels.size();
  json charges = json::array();
  for (std::size_t b = 0; b < meshes.size(); ++b)
    charges.push_back(complex_json(sol.total_charge(b)));
  sum["Q"] = charges;
  sum["rcond"] = sol.rcond;
  sum["residual"] = sol.residual;
  if (p.bc == BoundaryCondition::transmission)
  {
    sum["cells"] = sol.grid.size();
    sum["interface_residual"] = sol.interface_residual;
  }
  add_file(r, "summary.json", sum.dump(2) + "\n");
  r.manifest["results"] = sum;
}

LasOptions parse_las_options(json &s, double k, const std::string &base)
{
  (void)base;
  LasOptions o;
  json &sv = entry(s, "solver", "", json::object());
  o.keep_laplacian = get_bool(sv, "keep_laplacian", "solver", false);
  o.dense_limit = static_cast<std::size_t>(get_int(sv, "dense_limit", "solver", 4096));
  o.gmres.tolerance = get_double(sv, "tolerance", "solver", 1e-10);
  if (sv.contains("background"))
  {
    json &bg = sv["background"];
    MediumSpec spec;
    spec.box = get_box(bg, "box", "solver.background");
    spec.background_index_sq = get_field(bg, "index_sq", "solver.background");
    CollocationOptions co;
    const int n = get_int(bg, "cells", "solver.background", 8);
    co.cells = {n, n, n};
    o.kernel = BackgroundGreen(spec, k, co).kernel();
  }
  return o;
}

CloudOptions parse_cloud(json &s, const std::string &base)
{
  json &c = entry(s, "cloud", "", json::object());
  const std::string p = "cloud";
  CloudOptions o;
  o.box = get_box(c, "box", p);
  o.a = get_double(c, "a", p);
  o.bc = boundary_condition_from_string(get_string(c, "bc", p, "dirichlet"));
  o.density = get_field(c, "density", p, 1.0);
  o.kappa = get_double(c, "kappa", p, 0.5);
  o.min_separation = get_double(c, "min_separation", p, 0.0);
  o.jitter = get_double(c, "jitter", p, 1.0);
  o.max_particles = static_cast<std::size_t>(get_int(c, "max_particles", p, 200000));
  json &shape = entry(c, "shape", p, "sphere");
  if (shape.is_string())
  {
    if (shape.get<std::string>() != "sphere")
      bad(join(p, "shape"), "expected \"sphere\" or a geometry object");
  }
  else
  {
    o.shape = ParticleShape::from_mesh(parse_geometry(shape, join(p, "shape"), base));
  }
  switch (o.bc)
  {
    case BoundaryCondition::dirichlet:
      o.capacitance_density = get_field(c, "capacitance_density", p, 0.0);
      break;
    case BoundaryCondition::impedance:
      o.impedance = get_field(c, "impedance", p, 1.0);
      break;
    case BoundaryCondition::transmission:
      o.rho = get_field(c, "rho", p);
      o.k_interior = get_field(c, "k_interior", p);
      break;
    case BoundaryCondition::neumann:
      break;
  }
  return o;
}

void run_many_body(json &s, RunResult &r, const std::string &base)
{
  const double k = get_double(s, "k", "");
  const IncidentField incident = get_incident(s, k);
  CloudOptions co = parse_cloud(s, base);
  co.seed = s["seed"].get<std::uint64_t>();
  json &c = s["cloud"];
  ParticleCloud cloud;
  if (c.contains("centers"))
  {
    std::vector<Vec3> centers;
    for (std::size_t i = 0; i < c["centers"].size(); ++i)
      centers.push_back(as_vec3(c["centers"][i], "cloud.centers"));
    cloud = make_cloud(centers, co);
  }
  else
  {
    cloud = generate_cloud(co);
  }
  const LasOptions lo = parse_las_options(s, k, base);
  const auto probes = parse_probes(s, "probes");

  const auto t0 = std::chrono::steady_clock::now();
  const EffectiveFieldSolution sol = solve_las(cloud, k, incident, lo);
  const double solve_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  Table t{{"m", "x", "y", "z", "re_u", "im_u"}, {}};
  const bool vec = !sol.gradients.empty();
  if (vec)
  {
    for (const char *n : {"re_dudx", "im_dudx", "re_dudy", "im_dudy", "re_dudz", "im_dudz"})
      t.header.push_back(n);
  }
  for (std::size_t m = 0; m < cloud.size(); ++m)
  {
    const Vec3 &x = cloud.centers[m];
    std::vector<double> row{double(m), x.x(), x.y(), x.z(), sol.values[m].real(),
                            sol.values[m].imag()};
    if (vec)
    {
      for (int i = 0; i < 3; ++i)
      {
        row.push_back(sol.gradients[m][i].real());
        row.push_back(sol.gradients[m][i].imag());
      }
    }
    t.rows.push_back(std::move(row));
  }
  add_file(r, "solution.csv", t.to_csv());
  if (!probes.empty())
  {
    add_file(r, "probes.csv",
             field_table(probes, evaluate_field(cloud, sol, probes), incident).to_csv());
  }
  if (!sol.kernel)
  {
    const auto dirs = parse_directions(s);
    add_file(r, "amplitude.csv",
             amplitude_table(dirs, [&](const Vec3 &b) { return cloud_amplitude(cloud, sol, b); })
                 .to_csv());
  }
  json res;
  res["M"] = cloud.size();
  res["a"] = cloud.a;
  res["k"] = k;
  res["bc"] = to_string(cloud.bc);
  res["method"] = sol.dense ? "dense" : "gmres";
  res["iterations"] = sol.iterations;
  res["residual"] = sol.residual;
  res["min_separation"] = cloud.size() > 1 ? cloud.min_separation() : 0.0;
  res["timings"] = {{"solve_seconds", solve_seconds}};
  r.manifest["results"] = res;
}

CollocationOptions parse_collocation(json &s)
{
  json &c = entry(s, "collocation", "", json::object());
  CollocationOptions o;
  json &cells = entry(c, "cells", "collocation", json::array({8, 8, 8}));
  if (cells.is_number_integer())
  {
    const int n = cells.get<int>();
    o.cells = {n, n, n};
  }
  else if (cells.is_array() && cells.size() == 3)
  {
    o.cells = {cells[0].get<int>(), cells[1].get<int>(), cells[2].get<int>()};
  }
  else
  {
    bad("collocation.cells", "expected an integer or three integers");
  }
  const std::string self = get_string(c, "self_cell", "collocation", "ball");
  if (self == "ball")
    o.self_cell = SelfCell::ball;
  else if (self == "omit")
    o.self_cell = SelfCell::omit;
  else
    bad("collocation.self_cell", "expected \"ball\" or \"omit\"");
  o.dense_limit = static_cast<std::size_t>(get_int(c, "dense_limit", "collocation", 4096));
  o.gmres.tolerance = get_double(c, "tolerance", "collocation", 1e-10);
  return o;
}

Table node_table(const CollocationSolution &sol)
{
  std::vector<complex> u(sol.values.begin(), sol.values.end());
  return field_table(sol.grid.nodes, u, sol.incident);
}

void run_effective(json &s, RunResult &r, const std::string &base)
{
  const double k = get_double(s, "k", "");
  const IncidentField incident = get_incident(s, k);
  json &m = entry(s, "medium", "", json::object());
  const std::string p = "medium";
  MediumSpec spec;
  spec.box = get_box(m, "box", p);
  const BoundaryCondition bc = boundary_condition_from_string(get_string(m, "bc", p, "dirichlet"));
  const CollocationOptions co = parse_collocation(s);
  const auto probes = parse_probes(s, "probes");

  CollocationSolution sol;
  ScalarField q;
  switch (bc)
  {
    case BoundaryCondition::dirichlet:
      spec.number_density = get_field(m, "number_density", p);
      spec.capacitance_density = get_field(m, "capacitance_density", p, 4.0 * pi);
      sol = solve_limit_dirichlet(spec, k, incident, co);
      break;
    case BoundaryCondition::impedance:
    {
      spec.number_density = get_field(m, "number_density", p);
      spec.impedance = get_field(m, "impedance", p);
      const double b = get_double(m, "b", p, 4.0 * pi);
      sol = solve_limit_impedance(spec, k, b, incident, co);
      break;
    }
    case BoundaryCondition::neumann:
      spec.packing = get_field(m, "packing", p);
      spec.tensor = get_tensor(m, "tensor", p);
      sol = solve_limit_neumann(spec, k, incident, co);
      break;
    case BoundaryCondition::transmission:
    {
      spec.number_density = get_field(m, "number_density", p);
      spec.rho = get_field(m, "rho", p);
      spec.k_interior_sq = get_field(m, "k_interior_sq", p);
      json &shape = entry(m, "shape", p, "sphere");
      if (m.contains("tensor"))
        spec.tensor = get_tensor(m, "tensor", p);
      else if (shape.is_string() && shape.get<std::string>() == "sphere")
        spec.shape = ParticleShape::sphere();
      else if (shape.is_object())
        spec.shape = ParticleShape::from_mesh(parse_geometry(shape, join(p, "shape"), base));
      else
        bad(join(p, "shape"), "expected \"sphere\" or a geometry object");
      sol = solve_limit_transmission(spec, k, incident, co);
      break;
    }
  }
  add_file(r, "nodes.csv", node_table(sol).to_csv());
  if (!probes.empty())
    add_file(r, "probes.csv", field_table(probes, sol.evaluate(probes), incident).to_csv());
  json rep;
  rep["bc"] = to_string(bc);
  rep["nodes"] = sol.grid.size();
  rep["system_residual"] = sol.residual;
  rep["method"] = sol.dense ? "dense" : "gmres";
  rep["iterations"] = sol.iterations;
  if (sol.gradients.empty() && sol.grid.cells[0] >= 3 && sol.grid.cells[1] >= 3 &&
      sol.grid.cells[2] >= 3)
  {
    // q = -alpha is the potential of (Lap + k^2 - q) u = 0 inside the box.
    std::vector<complex> alpha = sol.alpha;
    const CollocationGrid grid = sol.grid;
    const ScalarField qf = ScalarField::from_function(
        [alpha, grid](const Vec3 &x) {
          const Vec3 t = ((x - grid.box.lo).array() / grid.spacing.array()).matrix();
          const int i = std::clamp(static_cast<int>(t.x()), 0, grid.cells[0] - 1);
          const int j = std::clamp(static_cast<int>(t.y()), 0, grid.cells[1] - 1);
          const int kk = std::clamp(static_cast<int>(t.z()), 0, grid.cells[2] - 1);
          return -alpha[grid.index(i, j, kk)];
        },
        "q");
    const PdeResidual pr = pde_residual(sol, qf);
    rep["pde_residual"] = {{"relative", pr.relative},
                           {"max_residual", pr.max_residual},
                           {"max_field", pr.max_field},
                           {"interior_nodes", pr.nodes}};
  }
  add_file(r, "residual.json", rep.dump(2) + "\n");
  r.manifest["results"] = rep;
}

void run_design(json &s, RunResult &r, const std::string &base)
{
  (void)base;
  const double k = get_double(s, "k", "");
  const double b = get_double(s, "b", "", 4.0 * pi);
  const ScalarField target = get_field(s, "target", "");
  json &g = entry(s, "grid", "", json::object());
  const Box box = get_box(g, "box", "grid");
  const int n = get_int(g, "nodes", "grid", 8);
  const CollocationGrid grid = make_collocation_grid(box, {n, n, n});
  const MaterialDesign d = design_material(target, k, b, grid.nodes);

  Table t{{"x", "y", "z", "N", "re_h", "im_h", "re_n2", "im_n2"}, {}};
  double roundtrip = 0.0;
  for (const auto &x : grid.nodes)
  {
    const double nn = d.number_density(x).real();
    const complex h = d.impedance(x);
    const complex n2 = refraction_coefficient(b * nn * h, k);
    roundtrip = std::max(roundtrip, std::abs(n2 - target(x)));
    t.rows.push_back({x.x(), x.y(), x.z(), nn, h.real(), h.imag(), n2.real(), n2.imag()});
  }
  add_file(r, "design.csv", t.to_csv());
  json rep;
  rep["roundtrip_error"] = roundtrip;
  if (s.contains("verify"))
  {
    json &v = s["verify"];
    if (!v.is_object())
      bad("verify", "expected an object");
    const IncidentField incident = get_incident(s, k);
    MediumSpec spec;
    spec.box = box;
    spec.number_density = d.number_density;
    spec.impedance = d.impedance;
    CollocationOptions co;
    const int cells = get_int(v, "cells", "verify", 12);
    co.cells = {cells, cells, cells};
    const CollocationSolution sol = solve_limit_impedance(spec, k, b, incident, co);
    const ScalarField q = ScalarField::from_function(
        [target, k](const Vec3 &x) { return k * k * (1.0 - target(x)); }, "k^2 (1 - n2)");
    const PdeResidual pr = pde_residual(sol, q);
    rep["pde_residual"] = {{"relative", pr.relative},
                           {"max_residual", pr.max_residual},
                           {"max_field", pr.max_field},
                           {"interior_nodes", pr.nodes}};
    add_file(r, "nodes.csv", node_table(sol).to_csv());
  }
  add_file(r, "design.json", rep.dump(2) + "\n");
  r.manifest["results"] = rep;
}

void run_background_green(json &s, RunResult &r, const std::string &base)
{
  (void)base;
  const double k = get_double(s, "k", "");
  json &m = entry(s, "medium", "", json::object());
  MediumSpec spec;
  spec.box = get_box(m, "box", "medium");
  spec.background_index_sq = get_field(m, "index_sq", "medium", 1.0);
  const CollocationOptions co = parse_collocation(s);
  const Vec3 source = get_vec3(s, "source", "");
  auto points = parse_probes(s, "points");
  if (points.empty())
    bad("points", "at least one evaluation point is required");
  const BackgroundGreen green(spec, k, co);
  const auto values = green.evaluate(points, source);
  Table t{{"x", "y", "z", "re_G", "im_G", "re_g", "im_g"}, {}};
  for (std::size_t i = 0; i < points.size(); ++i)
  {
    const complex g = kernel_g(points[i], source, k);
    t.rows.push_back({points[i].x(), points[i].y(), points[i].z(), values[i].real(),
                      values[i].imag(), g.real(), g.imag()});
  }
  add_file(r, "green.csv", t.to_csv());
  json res;
  res["nodes"] = green.grid().size();
  res["zero_contrast"] = green.zero_contrast();
  r.manifest["results"] = res;
}

}  // namespace

RunResult run_scenario(const std::string &mode_arg, json scenario, const RunOptions &options,
                       const std::string &base_dir)
{
  const auto start = std::chrono::steady_clock::now();
  if (!scenario.is_object())
  {
    throw ValidationError("invalid_scenario", "scenario must be a JSON object");
  }
  std::string mode = mode_arg;
  if (scenario.contains("mode"))
  {
    if (!scenario["mode"].is_string())
      bad("mode", "expected a string");
    const std::string declared = scenario["mode"].get<std::string>();
    if (!mode.empty() && declared != mode)
    {
      throw ValidationError("mode_mismatch", "scenario declares mode '" + declared +
                                                 "' but '" + mode + "' was requested");
    }
    mode = declared;
  }
  const auto &modes = scenario_modes();
  if (std::find(modes.begin(), modes.end(), mode) == modes.end())
  {
    throw ValidationError("invalid_scenario", "unknown mode '" + mode + "'");
  }
  scenario["mode"] = mode;
  if (options.seed)
  {
    scenario["seed"] = *options.seed;
  }
  else if (!scenario.contains("seed"))
  {
    scenario["seed"] = 1;
  }
  if (!scenario["seed"].is_number_unsigned() && !scenario["seed"].is_number_integer())
  {
    bad("seed", "expected a non-negative integer");
  }
  if (scenario["seed"].is_number_integer() && scenario["seed"].get<long long>() < 0)
  {
    bad("seed", "expected a non-negative integer");
  }
#ifdef _OPENMP
  if (options.threads > 0)
  {
    omp_set_num_threads(options.threads);
  }
#endif

  RunResult r;
  r.mode = mode;
  if (mode == "shape")
    run_shape(scenario, r, base_dir);
  else if (mode == "one-body")
    run_one_body(scenario, r, base_dir);
  else if (mode == "oracle")
    run_oracle(scenario, r, base_dir);
  else if (mode == "many-body")
    run_many_body(scenario, r, base_dir);
  else if (mode == "effective")
    run_effective(scenario, r, base_dir);
  else if (mode == "design")
    run_design(scenario, r, base_dir);
  else
    run_background_green(scenario, r, base_dir);

  r.manifest["version"] = version_string;
  r.manifest["mode"] = mode;
  r.manifest["seed"] = scenario["seed"];
  r.manifest["scenario"] = scenario;
  r.manifest["wall_clock_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json names = json::array();
  for (const auto &f : r.files)
    names.push_back(f.name);
  r.manifest["outputs"] = names;
  return r;
}

RunResult run_scenario_file(const std::string &mode, const std::string &scenario_path,
                            const std::string &out_dir, const RunOptions &options)
{
  std::ifstream in(scenario_path);
  if (!in)
  {
    throw ValidationError("file_not_found", "cannot open scenario '" + scenario_path + "'");
  }
  json scenario;
  try
  {
    scenario = json::parse(in, nullptr, true, true);
  }
  catch (const json::parse_error &e)
  {
    throw ValidationError("scenario_parse", scenario_path + ": " + e.what());
  }
  catch (const json::exception &e)
  {
    throw ValidationError("scenario_parse", scenario_path + ": " + e.what());
  }
  RunResult r;
  try
  {
    r = run_scenario(mode, std::move(scenario), options,
                     fs::absolute(scenario_path).parent_path().string());
  }
  catch (const json::exception &e)
  {
    throw ValidationError("invalid_scenario", scenario_path + ": " + e.what());
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec)
  {
    throw ValidationError("output_error", "cannot create '" + out_dir + "': " + ec.message());
  }
  auto write = [&](const std::string &name, const std::string &content) {
    std::ofstream out(fs::path(out_dir) / name, std::ios::binary);
    out << content;
    if (!out)
      throw ValidationError("output_error", "cannot write '" + name + "' in '" + out_dir + "'");
  };
  for (const auto &f : r.files)
    write(f.name, f.content);
  write("manifest.json", r.manifest.dump(2) + "\n");
  return r;
}

json CompareReport::to_json() const
{
  json j;
  j["tolerance"] = tolerance;
  j["max_error"] = max_error;
  j["passed"] = passed;
  j["columns"] = json::array();
  for (const auto &c : columns)
    j["columns"].push_back({{"file", c.file}, {"column", c.column}, {"error", c.error}});
  return j;
}

namespace
{

std::vector<std::string> csv_files(const std::string &dir)
{
  if (!fs::is_directory(dir))
  {
    throw ValidationError("file_not_found", "'" + dir + "' is not a directory");
  }
  std::vector<std::string> out;
  for (const auto &e : fs::directory_iterator(dir))
  {
    if (e.is_regular_file() && e.path().extension() == ".csv")
      out.push_back(e.path().filename().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string slurp(const fs::path &p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

CompareReport compare_runs(const std::string &dir_a, const std::string &dir_b, double tolerance)
{
  if (!(tolerance >= 0.0))
  {
    throw ValidationError("invalid_argument", "tolerance must be non-negative");
  }
  const auto files_a = csv_files(dir_a);
  const auto files_b = csv_files(dir_b);
  if (files_a != files_b)
  {
    throw ValidationError("schema_mismatch", "the two runs contain different CSV files");
  }
  if (files_a.empty())
  {
    throw ValidationError("schema_mismatch", "no CSV outputs to compare");
  }
  CompareReport report;
  report.tolerance = tolerance;
  for (const auto &name : files_a)
  {
    const Table a = Table::from_csv(slurp(fs::path(dir_a) / name), name);
    const Table b = Table::from_csv(slurp(fs::path(dir_b) / name), name);
    if (a.header != b.header)
    {
      throw ValidationError("schema_mismatch", name + ": column headers differ");
    }
    if (a.rows.size() != b.rows.size())
    {
      throw ValidationError("schema_mismatch", name + ": row counts differ");
    }
    std::map<std::string, std::size_t> col;
    for (std::size_t c = 0; c < a.header.size(); ++c)
      col[a.header[c]] = c;
    std::vector<bool> done(a.header.size(), false);
    for (std::size_t c = 0; c < a.header.size(); ++c)
    {
      if (done[c])
        continue;
      const std::string &h = a.header[c];
      std::size_t re = c, im = c;
      std::string label = h;
      bool paired = false;
      if (h.rfind("re_", 0) == 0 && col.count("im_" + h.substr(3)))
      {
        im = col["im_" + h.substr(3)];
        label = h.substr(3);
        paired = true;
      }
      else if (h.rfind("im_", 0) == 0 && col.count("re_" + h.substr(3)))
      {
        re = col["re_" + h.substr(3)];
        label = h.substr(3);
        paired = true;
      }
      double diff = 0.0, ref = 0.0;
      for (std::size_t i = 0; i < a.rows.size(); ++i)
      {
        const complex va(a.rows[i][re], paired ? a.rows[i][im] : 0.0);
        const complex vb(b.rows[i][re], paired ? b.rows[i][im] : 0.0);
        diff = std::max(diff, std::abs(va - vb));
        ref = std::max(ref, std::abs(vb));
      }
      done[re] = done[im] = true;
      const double err = ref > 0.0 ? diff / ref : diff;
      report.columns.push_back({name, label, err});
      report.max_error = std::max(report.max_error, err);
    }
  }
  report.passed = report.max_error <= tolerance;
  return report;
}

}  // namespace smallscat
