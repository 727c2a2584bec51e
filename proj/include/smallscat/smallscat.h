// Copyright The smallscat Authors.
// SPDX-License-Identifier: Apache-2.0

/*
 * C interface of the smallscat library.
 *
 * Objects are opaque handles released with the matching *_destroy function. Every call that can
 * fail returns an ssc_status; on failure the short error code (e.g. "density_too_high") and a
 * message are available from ssc_last_error_code() / ssc_last_error_message() until the next
 * failing call on the same thread. Complex outputs are interleaved (re, im) pairs.
 */

#ifndef SMALLSCAT_H
#define SMALLSCAT_H

#include <stddef.h>
#include <stdint.h>

#if defined(SMALLSCAT_BUILDING)
#define SSC_API __attribute__((visibility("default")))
#else
#define SSC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ssc_status
{
  SSC_OK = 0,
  SSC_ERR_INTERNAL = 1,
  SSC_ERR_VALIDATION = 2,
  SSC_ERR_SOLVER = 3,
  SSC_ERR_COMPARISON = 4
} ssc_status;

typedef enum ssc_bc
{
  SSC_BC_DIRICHLET = 0,
  SSC_BC_IMPEDANCE = 1,
  SSC_BC_NEUMANN = 2,
  SSC_BC_TRANSMISSION = 3
} ssc_bc;

typedef struct ssc_mesh ssc_mesh;
typedef struct ssc_cloud ssc_cloud;
typedef struct ssc_cloud_solution ssc_cloud_solution;

SSC_API const char *ssc_version(void);
SSC_API const char *ssc_last_error_code(void);
SSC_API const char *ssc_last_error_message(void);
/* 0 keeps the runtime default. */
SSC_API ssc_status ssc_set_threads(int threads);
SSC_API void ssc_set_warnings(int enabled);
SSC_API void ssc_free_string(char *s);

/* ---- meshes ---------------------------------------------------------------------------- */

typedef struct ssc_mesh_info
{
  size_t vertices;
  size_t panels;
  double area;
  double volume;
  double size; /* half the diameter */
  double barycenter[3];
} ssc_mesh_info;

SSC_API ssc_status ssc_mesh_sphere(double radius, int refinement, ssc_mesh **out);
SSC_API ssc_status ssc_mesh_ellipsoid(const double semi_axes[3], int refinement, ssc_mesh **out);
SSC_API ssc_status ssc_mesh_cube(double edge, int subdivisions, ssc_mesh **out);
SSC_API ssc_status ssc_mesh_load(const char *path, ssc_mesh **out);
/* vertices: 3 * n_vertices doubles; panels: 3 * n_panels zero-based indices, outward order. */
SSC_API ssc_status ssc_mesh_from_arrays(const double *vertices, size_t n_vertices,
                                        const int32_t *panels, size_t n_panels, ssc_mesh **out);
/* x -> linear * x + shift, linear row-major. */
SSC_API ssc_status ssc_mesh_transform(const ssc_mesh *mesh, const double linear[9],
                                      const double shift[3], ssc_mesh **out);
SSC_API ssc_status ssc_mesh_info_get(const ssc_mesh *mesh, ssc_mesh_info *info);
SSC_API void ssc_mesh_destroy(ssc_mesh *mesh);

/* ---- shape functionals ----------------------------------------------------------------- */

typedef struct ssc_shape_functionals
{
  double capacitance_zeroth;
  double capacitance_bem;
  double polarizability[9]; /* row-major, at the requested lambda */
  double lambda;
  double volume;
  double area;
} ssc_shape_functionals;

SSC_API ssc_status ssc_shape_functionals_compute(const ssc_mesh *mesh, double lambda,
                                                 ssc_shape_functionals *out);

/* ---- single body ----------------------------------------------------------------------- */

typedef struct ssc_body_params
{
  ssc_bc bc;
  double k;
  double direction[3]; /* plane wave e^{ik direction.x} */
  double zeta[2];      /* impedance, Im <= 0 */
  double rho;          /* transmission */
  double k_interior;   /* transmission */
} ssc_body_params;

SSC_API void ssc_body_params_default(ssc_body_params *params);

/* Asymptotic scattering amplitude at n unit directions (3n doubles); out holds 2n doubles. */
SSC_API ssc_status ssc_one_body_amplitudes(const ssc_mesh *mesh, const ssc_body_params *params,
                                           const double *directions, size_t n, double *out);
/* Same quantity from the full boundary-element solve. */
SSC_API ssc_status ssc_oracle_amplitudes(const ssc_mesh *mesh, const ssc_body_params *params,
                                         const double *directions, size_t n, double *out);

/* ---- many small bodies ----------------------------------------------------------------- */

typedef struct ssc_cloud_options
{
  double lo[3];
  double hi[3];
  double a;
  ssc_bc bc;
  const char *density; /* expression in x, y, z */
  double kappa;
  double min_separation;
  double jitter;
  uint64_t seed;
  const char *impedance;  /* impedance, expression */
  const char *rho;        /* transmission, expression */
  const char *k_interior; /* transmission, expression */
} ssc_cloud_options;

SSC_API void ssc_cloud_options_default(ssc_cloud_options *options);
SSC_API ssc_status ssc_cloud_generate(const ssc_cloud_options *options, ssc_cloud **out);
/* Explicit centers (3n doubles); the remaining parameters come from the options. */
SSC_API ssc_status ssc_cloud_from_centers(const ssc_cloud_options *options, const double *centers,
                                          size_t n, ssc_cloud **out);
SSC_API size_t ssc_cloud_size(const ssc_cloud *cloud);
/* Copies up to `capacity` centers (3 doubles each). */
SSC_API ssc_status ssc_cloud_centers(const ssc_cloud *cloud, double *out, size_t capacity);
SSC_API void ssc_cloud_destroy(ssc_cloud *cloud);

SSC_API ssc_status ssc_cloud_solve(const ssc_cloud *cloud, double k, const double direction[3],
                                   ssc_cloud_solution **out);
/* Effective field at the particle centers; out holds 2 * size doubles. */
SSC_API ssc_status ssc_cloud_solution_values(const ssc_cloud_solution *solution, double *out,
                                             size_t capacity);
SSC_API ssc_status ssc_cloud_evaluate(const ssc_cloud_solution *solution, const double *points,
                                      size_t n, double *out);
SSC_API void ssc_cloud_solution_destroy(ssc_cloud_solution *solution);

/* ---- scenario runs --------------------------------------------------------------------- */

/* Runs `mode` on a JSON scenario file and writes the outputs into out_dir. `seed` may be NULL.
 * When summary is non-NULL it receives a string (free with ssc_free_string). */
SSC_API ssc_status ssc_run(const char *mode, const char *scenario_path, const char *out_dir,
                           const uint64_t *seed, int threads, char **summary);
/* Compares the CSV outputs of two runs. Returns SSC_ERR_COMPARISON when the tolerance is
 * exceeded; the JSON report is returned in both cases when report is non-NULL. */
SSC_API ssc_status ssc_compare(const char *dir_a, const char *dir_b, double tolerance,
                               char **report);

#ifdef __cplusplus
}
#endif

#endif /* SMALLSCAT_H */
