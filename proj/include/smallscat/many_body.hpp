// Copyright The smallscat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SMALLSCAT_MANY_BODY_HPP
#define SMALLSCAT_MANY_BODY_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "smallscat/fields.hpp"
#include "smallscat/geometry.hpp"
#include "smallscat/incident.hpp"
#include "smallscat/linalg.hpp"
#include "smallscat/one_body.hpp"

namespace smallscat
{

//
// Shape family shared by every particle of a cloud, described at unit size (a = 1). A body of
// size a has capacitance C a, area S a^2, volume V a^3 and a scale-free polarizability.
//
class ParticleShape
{
public:
  // Exact ball functionals: C = 4 pi, S = 4 pi, V = 4 pi / 3, beta(lambda) = -6 lambda/(3+lambda) I.
  static ParticleShape sphere();
  // Functionals computed on `mesh` rescaled to unit size.
  static ParticleShape from_mesh(const SurfaceMesh &mesh);

  const std::string &name() const { return label; }
  double capacitance() const { return unit_capacitance; }
  double area() const { return unit_area; }
  double volume() const { return unit_volume; }
  Mat3 polarizability(double lambda) const;

private:
  std::string label = "sphere";
  double unit_capacitance = 4.0 * pi;
  double unit_area = 4.0 * pi;
  double unit_volume = 4.0 * pi / 3.0;
  std::shared_ptr<const SurfaceMesh> mesh;
  std::shared_ptr<std::map<double, Mat3>> tensor_cache;
};

//
// Particles of common size a inside a box. Only the per-particle arrays belonging to `bc`
// are populated.
//
struct ParticleCloud
{
  Box box;
  double a = 0.0;
  BoundaryCondition bc = BoundaryCondition::dirichlet;
  std::vector<Vec3> centers;

  std::vector<double> capacitance;   // dirichlet: C_m
  std::vector<complex> impedance;    // impedance: h(x_m), Im h <= 0
  std::vector<double> area_factor;   // impedance: b_m = |S_m| a^-2
  double kappa = 0.5;                // impedance: zeta_m = h(x_m) / a^kappa, kappa in (0, 1)
  std::vector<double> volume;        // neumann, transmission: V_m
  std::vector<Mat3> polarizability;  // neumann (lambda = 1), transmission (lambda_m)
  std::vector<double> rho;           // transmission: density ratio
  std::vector<double> k_interior;    // transmission: k_m

  std::size_t size() const { return centers.size(); }
  // Smallest pairwise center distance (infinity for fewer than two particles).
  double min_separation() const;
  // Checks array lengths, sign constraints and separation > 2a.
  void validate() const;
};

struct CloudOptions
{
  Box box;
  double a = 0.01;
  BoundaryCondition bc = BoundaryCondition::dirichlet;
  // Number density N(x) >= 0 entering the placement law.
  ScalarField density = ScalarField(1.0);
  double kappa = 0.5;
  // Requested minimum separation; the effective value is max(5a, this).
  double min_separation = 0.0;
  // Fraction of the admissible jitter range used when placing particles inside sub-cells.
  double jitter = 1.0;
  std::size_t max_particles = 200000;
  std::uint64_t seed = 1;
  ParticleShape shape = ParticleShape::sphere();
  // Per-particle parameter fields evaluated at the centers.
  ScalarField capacitance_density;  // dirichlet: C_m = c(x_m) a; zero means use the shape
  ScalarField impedance = ScalarField(1.0);
  ScalarField rho = ScalarField(1.0);
  ScalarField k_interior = ScalarField(1.0);
};

// Expected particle count in a region for the placement law of `bc`, given int N over it.
double expected_particle_count(BoundaryCondition bc, double integral_n, double a, double kappa,
                               double unit_volume);

// Stratified placement; throws ValidationError "density_too_high" naming the cell where the
// separation cannot be honoured and "resource_limit" beyond max_particles.
ParticleCloud generate_cloud(const CloudOptions &options);

// Cloud at explicit centers with parameters taken from the options' fields.
ParticleCloud make_cloud(const std::vector<Vec3> &centers, const CloudOptions &options);

using KernelFn = std::function<complex(const Vec3 &, const Vec3 &)>;

struct LasOptions
{
  // Keep Laplacian unknowns (5 per particle) instead of eliminating them with -k^2 u.
  bool keep_laplacian = false;
  // Largest unknown count solved by dense LU; larger systems use GMRES.
  std::size_t dense_limit = 4096;
  GmresOptions gmres;
  double min_rcond = 1e-14;
  // Replacement for the free-space kernel (scalar systems only).
  KernelFn kernel;
};

struct EffectiveFieldSolution
{
  BoundaryCondition bc = BoundaryCondition::dirichlet;
  double k = 0.0;
  std::vector<complex> values;
  std::vector<CVec3> gradients;
  std::vector<complex> laplacians;
  IncidentField incident;
  bool dense = true;
  double residual = 0.0;
  int iterations = 0;
  bool laplacian_unknowns = false;
  KernelFn kernel;

  // Per-particle coefficients of the point-interaction representation
  //   u(x) = u0(x) + sum_m G(x, x_m) [mu_m u_m + nu_m Lap u_m + beta_m . T_m grad u_m].
  std::vector<complex> mu, nu;
  std::vector<CMat3> tensor;
};

EffectiveFieldSolution solve_las_dirichlet(const ParticleCloud &cloud, double k,
                                           const IncidentField &incident,
                                           const LasOptions &options = {});
EffectiveFieldSolution solve_las_impedance(const ParticleCloud &cloud, double k,
                                           const IncidentField &incident,
                                           const LasOptions &options = {});
EffectiveFieldSolution solve_las_neumann(const ParticleCloud &cloud, double k,
                                         const IncidentField &incident,
                                         const LasOptions &options = {});
EffectiveFieldSolution solve_las_transmission(const ParticleCloud &cloud, double k,
                                              const IncidentField &incident,
                                              const LasOptions &options = {});
// Dispatches on cloud.bc.
EffectiveFieldSolution solve_las(const ParticleCloud &cloud, double k,
                                 const IncidentField &incident, const LasOptions &options = {});

// Total field; warns when x is closer than 3a to a center.
complex evaluate_field(const ParticleCloud &cloud, const EffectiveFieldSolution &solution,
                       const Vec3 &x);
std::vector<complex> evaluate_field(const ParticleCloud &cloud,
                                    const EffectiveFieldSolution &solution,
                                    const std::vector<Vec3> &points);

// (1/4pi) sum_m e^{-ik beta.x_m} [mu u + nu Lap u + beta . T grad u], free-space kernel only.
complex cloud_amplitude(const ParticleCloud &cloud, const EffectiveFieldSolution &solution,
                        const Vec3 &beta);

}  // namespace smallscat

#endif  // SMALLSCAT_MANY_BODY_HPP
