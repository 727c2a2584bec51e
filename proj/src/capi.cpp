// Copyright The smallscat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "smallscat/smallscat.h"

#include <cstring>
#include <new>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "smallscat/bem_oracle.hpp"
#include "smallscat/geometry.hpp"
#include "smallscat/many_body.hpp"
#include "smallscat/one_body.hpp"
#include "smallscat/scenario.hpp"
#include "smallscat/shape_functionals.hpp"

struct ssc_mesh
{
  smallscat::SurfaceMesh mesh;
};

struct ssc_cloud
{
  smallscat::ParticleCloud cloud;
};

struct ssc_cloud_solution
{
  smallscat::ParticleCloud cloud;
  smallscat::EffectiveFieldSolution solution;
};

namespace
{

using namespace smallscat;

thread_local std::string last_code;
thread_local std::string last_message;

ssc_status fail(ssc_status status, std::string code, std::string message)
{
  last_code = std::move(code);
  last_message = std::move(message);
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <class F>
ssc_status guarded(F &&body)
{
  try
  {
    body();
    return SSC_OK;
  }
  catch (const Error &e)
  {
    switch (e.kind())
    {
      case ErrorKind::validation:
        return fail(SSC_ERR_VALIDATION, e.code(), e.what());
      case ErrorKind::solver:
        return fail(SSC_ERR_SOLVER, e.code(), e.what());
      case ErrorKind::comparison:
        return fail(SSC_ERR_COMPARISON, e.code(), e.what());
      case ErrorKind::internal:
        break;
    }
    return fail(SSC_ERR_INTERNAL, e.code(), e.what());
  }
  catch (const std::bad_alloc &)
  {
    return fail(SSC_ERR_INTERNAL, "out_of_memory", "allocation failed");
  }
  catch (const std::exception &e)
  {
    return fail(SSC_ERR_INTERNAL, "internal", e.what());
  }
  catch (...)
  {
    return fail(SSC_ERR_INTERNAL, "internal", "unknown exception");
  }
}

void require(bool ok, const char *what)
{
  if (!ok)
    throw ValidationError("invalid_argument", what);
}

char *dup_string(const std::string &s)
{
  char *out = static_cast<char *>(std::malloc(s.size() + 1));
  if (!out)
    throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

BoundaryCondition to_bc(ssc_bc bc)
{
  switch (bc)
  {
    case SSC_BC_DIRICHLET:
      return BoundaryCondition::dirichlet;
    case SSC_BC_IMPEDANCE:
      return BoundaryCondition::impedance;
    case SSC_BC_NEUMANN:
      return BoundaryCondition::neumann;
    case SSC_BC_TRANSMISSION:
      return BoundaryCondition::transmission;
  }
  throw ValidationError("invalid_argument", "unknown boundary condition");
}

Vec3 vec(const double *v) { return Vec3(v[0], v[1], v[2]); }

template <class F>
ssc_status build_mesh(ssc_mesh **out, F &&make)
{
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    *out = new ssc_mesh{make()};
  });
}

ScalarField field_or(const char *text, double fallback)
{
  return text ? ScalarField::from_string(text) : ScalarField(fallback);
}

CloudOptions convert(const ssc_cloud_options *o)
{
  require(o != nullptr, "options must not be NULL");
  CloudOptions c;
  c.box = Box{vec(o->lo), vec(o->hi)};
  c.a = o->a;
  c.bc = to_bc(o->bc);
  c.density = field_or(o->density, 1.0);
  c.kappa = o->kappa;
  c.min_separation = o->min_separation;
  c.jitter = o->jitter;
  c.seed = o->seed;
  c.impedance = field_or(o->impedance, 1.0);
  c.rho = field_or(o->rho, 1.0);
  c.k_interior = field_or(o->k_interior, 1.0);
  return c;
}

template <class F>
ssc_status amplitudes(const ssc_mesh *mesh, const ssc_body_params *p, const double *directions,
                      std::size_t n, double *out, F &&solve)
{
  return guarded([&] {
    require(mesh && p && (n == 0 || (directions && out)), "NULL argument");
    require(p->k > 0.0, "k must be positive");
    const IncidentField incident = IncidentField::plane_wave(vec(p->direction), p->k);
    const auto amplitude = solve(mesh->mesh, *p, incident);
    for (std::size_t i = 0; i < n; ++i)
    {
      const complex a = amplitude(vec(directions + 3 * i).normalized());
      out[2 * i] = a.real();
      out[2 * i + 1] = a.imag();
    }
  });
}

}  // namespace

extern "C" {

const char *ssc_version(void) { return version_string; }
const char *ssc_last_error_code(void) { return last_code.c_str(); }
const char *ssc_last_error_message(void) { return last_message.c_str(); }

ssc_status ssc_set_threads(int threads)
{
  return guarded([&] {
    require(threads >= 0, "threads must be non-negative");
#ifdef _OPENMP
    if (threads > 0)
      omp_set_num_threads(threads);
#endif
  });
}

void ssc_set_warnings(int enabled) { set_warnings_enabled(enabled != 0); }
void ssc_free_string(char *s) { std::free(s); }

ssc_status ssc_mesh_sphere(double radius, int refinement, ssc_mesh **out)
{
  return build_mesh(out, [&] { return make_sphere_mesh(radius, refinement); });
}

ssc_status ssc_mesh_ellipsoid(const double semi_axes[3], int refinement, ssc_mesh **out)
{
  return build_mesh(out, [&] {
    require(semi_axes != nullptr, "semi_axes must not be NULL");
    return make_ellipsoid_mesh(vec(semi_axes), refinement);
  });
}

ssc_status ssc_mesh_cube(double edge, int subdivisions, ssc_mesh **out)
{
  return build_mesh(out, [&] { return make_cube_mesh(edge, subdivisions); });
}

ssc_status ssc_mesh_load(const char *path, ssc_mesh **out)
{
  return build_mesh(out, [&] {
    require(path != nullptr, "path must not be NULL");
    return read_mesh_file(path);
  });
}

ssc_status ssc_mesh_from_arrays(const double *vertices, size_t n_vertices, const int32_t *panels,
                                size_t n_panels, ssc_mesh **out)
{
  return build_mesh(out, [&] {
    require(vertices && panels, "arrays must not be NULL");
    std::vector<Vec3> v(n_vertices);
    for (std::size_t i = 0; i < n_vertices; ++i)
      v[i] = vec(vertices + 3 * i);
    std::vector<std::array<int, 3>> p(n_panels);
    for (std::size_t i = 0; i < n_panels; ++i)
      p[i] = {panels[3 * i], panels[3 * i + 1], panels[3 * i + 2]};
    return SurfaceMesh(std::move(v), std::move(p));
  });
}

ssc_status ssc_mesh_transform(const ssc_mesh *mesh, const double linear[9], const double shift[3],
                              ssc_mesh **out)
{
  return build_mesh(out, [&] {
    require(mesh && linear, "NULL argument");
    Mat3 a;
    for (int i = 0; i < 9; ++i)
      a(i / 3, i % 3) = linear[i];
    return mesh->mesh.transformed(a, shift ? vec(shift) : Vec3::Zero());
  });
}

ssc_status ssc_mesh_info_get(const ssc_mesh *mesh, ssc_mesh_info *info)
{
  return guarded([&] {
    require(mesh && info, "NULL argument");
    const SurfaceMesh &m = mesh->mesh;
    info->vertices = m.vertices().size();
    info->panels = m.panel_count();
    info->area = m.area();
    info->volume = m.volume();
    info->size = m.size();
    for (int i = 0; i < 3; ++i)
      info->barycenter[i] = m.barycenter()[i];
  });
}

void ssc_mesh_destroy(ssc_mesh *mesh) { delete mesh; }

ssc_status ssc_shape_functionals_compute(const ssc_mesh *mesh, double lambda,
                                         ssc_shape_functionals *out)
{
  return guarded([&] {
    require(mesh && out, "NULL argument");
    const ShapeFunctionals f = compute_shape_functionals(mesh->mesh, lambda);
    out->capacitance_zeroth = capacitance_zeroth(mesh->mesh);
    out->capacitance_bem = f.capacitance;
    for (int i = 0; i < 9; ++i)
      out->polarizability[i] = f.polarizability(i / 3, i % 3);
    out->lambda = f.lambda;
    out->volume = f.volume;
    out->area = f.area;
  });
}

void ssc_body_params_default(ssc_body_params *p)
{
  if (!p)
    return;
  *p = ssc_body_params{};
  p->bc = SSC_BC_DIRICHLET;
  p->k = 1.0;
  p->direction[2] = 1.0;
  p->rho = 1.0;
  p->k_interior = 1.0;
}

ssc_status ssc_one_body_amplitudes(const ssc_mesh *mesh, const ssc_body_params *params,
                                   const double *directions, size_t n, double *out)
{
  return amplitudes(mesh, params, directions, n, out,
                    [](const SurfaceMesh &m, const ssc_body_params &p, const IncidentField &inc) {
                      const Vec3 c = m.barycenter();
                      OneBodyResult r;
                      switch (to_bc(p.bc))
                      {
                        case BoundaryCondition::dirichlet:
                          r = one_body_dirichlet(capacitance_bem(m), p.k, inc, c, m.size());
                          break;
                        case BoundaryCondition::impedance:
                          r = one_body_impedance(complex(p.zeta[0], p.zeta[1]), m.area(), p.k,
                                                 inc, c, m.size());
                          break;
                        case BoundaryCondition::neumann:
                          r = one_body_neumann(m.volume(), polarizability_tensor(m, 1.0), p.k,
                                               inc, c, m.size());
                          break;
                        case BoundaryCondition::transmission:
                          r = one_body_transmission(
                              compute_shape_functionals(m, transmission_lambda(p.rho)), p.rho,
                              p.k, p.k_interior, inc, c, m.size());
                          break;
                      }
                      return [r](const Vec3 &beta) { return r.amplitude(beta); };
                    });
}

ssc_status ssc_oracle_amplitudes(const ssc_mesh *mesh, const ssc_body_params *params,
                                 const double *directions, size_t n, double *out)
{
  return amplitudes(mesh, params, directions, n, out,
                    [](const SurfaceMesh &m, const ssc_body_params &p, const IncidentField &inc) {
                      const std::vector<SurfaceMesh> meshes{m};
                      BemSolution s;
                      switch (to_bc(p.bc))
                      {
                        case BoundaryCondition::dirichlet:
                          s = solve_dirichlet_bem(meshes, p.k, inc);
                          break;
                        case BoundaryCondition::impedance:
                          s = solve_impedance_bem(meshes, p.k, complex(p.zeta[0], p.zeta[1]), inc);
                          break;
                        case BoundaryCondition::neumann:
                          s = solve_neumann_bem(meshes, p.k, inc);
                          break;
                        case BoundaryCondition::transmission:
                          s = solve_transmission_bem(m, make_volume_grid(m), p.k, p.k_interior,
                                                     p.rho, inc);
                          break;
                      }
                      return [s = std::move(s)](const Vec3 &beta) { return far_field(s, beta); };
                    });
}

void ssc_cloud_options_default(ssc_cloud_options *o)
{
  if (!o)
    return;
  *o = ssc_cloud_options{};
  o->hi[0] = o->hi[1] = o->hi[2] = 1.0;
  o->a = 0.01;
  o->bc = SSC_BC_DIRICHLET;
  o->kappa = 0.5;
  o->jitter = 1.0;
  o->seed = 1;
}

ssc_status ssc_cloud_generate(const ssc_cloud_options *options, ssc_cloud **out)
{
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    *out = new ssc_cloud{generate_cloud(convert(options))};
  });
}

ssc_status ssc_cloud_from_centers(const ssc_cloud_options *options, const double *centers,
                                  size_t n, ssc_cloud **out)
{
  return guarded([&] {
    require(out && (centers || n == 0), "NULL argument");
    std::vector<Vec3> c(n);
    for (std::size_t i = 0; i < n; ++i)
      c[i] = vec(centers + 3 * i);
    *out = new ssc_cloud{make_cloud(c, convert(options))};
  });
}

size_t ssc_cloud_size(const ssc_cloud *cloud) { return cloud ? cloud->cloud.size() : 0; }

ssc_status ssc_cloud_centers(const ssc_cloud *cloud, double *out, size_t capacity)
{
  return guarded([&] {
    require(cloud && out, "NULL argument");
    const auto &c = cloud->cloud.centers;
    for (std::size_t i = 0; i < c.size() && i < capacity; ++i)
      for (int d = 0; d < 3; ++d)
        out[3 * i + d] = c[i][d];
  });
}

void ssc_cloud_destroy(ssc_cloud *cloud) { delete cloud; }

ssc_status ssc_cloud_solve(const ssc_cloud *cloud, double k, const double direction[3],
                           ssc_cloud_solution **out)
{
  return guarded([&] {
    require(cloud && direction && out, "NULL argument");
    require(k > 0.0, "k must be positive");
    const IncidentField inc = IncidentField::plane_wave(vec(direction), k);
    *out = new ssc_cloud_solution{cloud->cloud, solve_las(cloud->cloud, k, inc)};
  });
}

ssc_status ssc_cloud_solution_values(const ssc_cloud_solution *solution, double *out,
                                     size_t capacity)
{
  return guarded([&] {
    require(solution && out, "NULL argument");
    const auto &v = solution->solution.values;
    for (std::size_t i = 0; i < v.size() && i < capacity; ++i)
    {
      out[2 * i] = v[i].real();
      out[2 * i + 1] = v[i].imag();
    }
  });
}

ssc_status ssc_cloud_evaluate(const ssc_cloud_solution *solution, const double *points, size_t n,
                              double *out)
{
  return guarded([&] {
    require(solution && (n == 0 || (points && out)), "NULL argument");
    std::vector<Vec3> p(n);
    for (std::size_t i = 0; i < n; ++i)
      p[i] = vec(points + 3 * i);
    const auto u = evaluate_field(solution->cloud, solution->solution, p);
    for (std::size_t i = 0; i < n; ++i)
    {
      out[2 * i] = u[i].real();
      out[2 * i + 1] = u[i].imag();
    }
  });
}

void ssc_cloud_solution_destroy(ssc_cloud_solution *solution) { delete solution; }

ssc_status ssc_run(const char *mode, const char *scenario_path, const char *out_dir,
                   const uint64_t *seed, int threads, char **summary)
{
  return guarded([&] {
    require(mode && scenario_path && out_dir, "NULL argument");
    require(threads >= 0, "threads must be non-negative");
    RunOptions opts;
    if (seed)
      opts.seed = *seed;
    opts.threads = threads;
    const RunResult r = run_scenario_file(mode, scenario_path, out_dir, opts);
    if (summary)
      *summary = dup_string(r.summary);
  });
}

ssc_status ssc_compare(const char *dir_a, const char *dir_b, double tolerance, char **report)
{
  bool passed = true;
  std::string text;
  const ssc_status st = guarded([&] {
    require(dir_a && dir_b, "NULL argument");
    const CompareReport r = compare_runs(dir_a, dir_b, tolerance);
    passed = r.passed;
    text = r.to_json().dump(2);
    if (report)
      *report = dup_string(text);
  });
  if (st != SSC_OK)
    return st;
  if (!passed)
  {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", tolerance);
    return fail(SSC_ERR_COMPARISON, "tolerance_exceeded",
                std::string("relative error exceeds tolerance ") + buf);
  }
  return SSC_OK;
}

}  // extern "C"
