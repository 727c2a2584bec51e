// Copyright The smallscat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SMALLSCAT_EFFECTIVE_MEDIUM_HPP
#define SMALLSCAT_EFFECTIVE_MEDIUM_HPP

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "smallscat/fields.hpp"
#include "smallscat/incident.hpp"
#include "smallscat/linalg.hpp"
#include "smallscat/many_body.hpp"
#include "smallscat/one_body.hpp"

namespace smallscat
{

//
// Material description on a box. Which fields are read depends on the equation being solved:
//   dirichlet     c, N
//   impedance     h, N (and the scalar b passed to the solver)
//   neumann       packing, tensor (B)
//   transmission  rho, k_interior_sq (K^2), N, tensor (beta(y, lambda)) or shape
//   background    background_index_sq (n0^2, taken as 1 outside the box)
//
struct MediumSpec
{
  Box box;
  ScalarField number_density = ScalarField(0.0);
  ScalarField capacitance_density = ScalarField(4.0 * pi);
  ScalarField impedance = ScalarField(0.0);
  ScalarField packing = ScalarField(0.0);
  ScalarField rho = ScalarField(1.0);
  ScalarField k_interior_sq = ScalarField(1.0);
  ScalarField background_index_sq = ScalarField(1.0);
  TensorField tensor;
  // When set, the transmission tensor is beta(lambda(rho(y))) of this shape times N(y).
  std::optional<ParticleShape> shape;
};

// Treatment of the weakly singular self-cell integral of the collocation system.
enum class SelfCell
{
  ball,  // equal-volume ball closed form
  omit   // drop the diagonal term
};

struct CollocationOptions
{
  std::array<int, 3> cells{8, 8, 8};
  SelfCell self_cell = SelfCell::ball;
  std::size_t dense_limit = 4096;
  GmresOptions gmres;
  double min_rcond = 1e-14;
};

// Cell-centered uniform grid; nodes are ordered x fastest.
struct CollocationGrid
{
  Box box;
  std::array<int, 3> cells{};
  Vec3 spacing = Vec3::Zero();
  double cell_volume = 0.0;
  std::vector<Vec3> nodes;

  std::size_t size() const { return nodes.size(); }
  std::size_t index(int i, int j, int k) const
  {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(cells[0]) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(cells[1]) * k);
  }
};

CollocationGrid make_collocation_grid(const Box &box, const std::array<int, 3> &cells);

//
// Solution of u(x) = u0(x) + int_D g(x,y) [alpha(y) u(y) + beta(x,y) . T(y) grad u(y)] dy on the
// collocation grid, beta(x,y) = (x-y)/|x-y|. The Laplacian has been replaced by -k^2 u.
//
struct CollocationSolution
{
  BoundaryCondition bc = BoundaryCondition::dirichlet;
  double k = 0.0;
  CollocationGrid grid;
  SelfCell self_cell = SelfCell::ball;
  std::vector<complex> values;
  std::vector<CVec3> gradients;  // neumann and transmission only
  std::vector<complex> alpha;
  std::vector<CMat3> tensor;
  IncidentField incident;
  double residual = 0.0;
  bool dense = true;
  int iterations = 0;

  // Nystrom interpolant of the solution at any point.
  complex evaluate(const Vec3 &x) const;
  std::vector<complex> evaluate(const std::vector<Vec3> &points) const;
};

CollocationSolution solve_limit_dirichlet(const MediumSpec &spec, double k,
                                          const IncidentField &incident,
                                          const CollocationOptions &options = {});
// Requires b > 0 and Im h <= 0 at every node.
CollocationSolution solve_limit_impedance(const MediumSpec &spec, double k, double b,
                                          const IncidentField &incident,
                                          const CollocationOptions &options = {});
CollocationSolution solve_limit_neumann(const MediumSpec &spec, double k,
                                        const IncidentField &incident,
                                        const CollocationOptions &options = {});
CollocationSolution solve_limit_transmission(const MediumSpec &spec, double k,
                                             const IncidentField &incident,
                                             const CollocationOptions &options = {});

// Finite-difference check of (Lap + k^2 - q) u = 0 on nodes whose six neighbours are all
// nodes. The reported value is max |residual| / (k^2 max |u|) over those nodes.
struct PdeResidual
{
  double relative = 0.0;
  double max_residual = 0.0;
  double max_field = 0.0;
  std::size_t nodes = 0;
};
PdeResidual pde_residual(const CollocationSolution &solution, const ScalarField &q);

// n^2 = 1 - q / k^2.
complex refraction_coefficient(complex q, double k);
ScalarField refraction_coefficient(const ScalarField &q, double k);

struct MaterialDesign
{
  ScalarField number_density;  // N = |q| / b
  ScalarField impedance;       // h = q / |q|, 0 where q = 0
};

// Pointwise factorization q = k^2 (1 - n^2) = b N h. Rejects Im n^2 < 0 and b <= 0.
std::pair<double, complex> design_point(complex n2_target, double k, double b);
// Field version; the sign constraint is checked at `check_points` (and lazily at evaluation).
MaterialDesign design_material(const ScalarField &n2_target, double k, double b,
                               const std::vector<Vec3> &check_points = {});

//
// Green's function of Lap + k^2 n0^2(x) with n0^2 = 1 outside the box, from the volume integral
// equation G(x,y) = g(x,y) + k^2 int g(x,z) (n0^2(z) - 1) G(z,y) dz collocated on a grid.
//
class BackgroundGreen
{
public:
  BackgroundGreen(const MediumSpec &spec, double k, const CollocationOptions &options = {});

  // G(z_p, y) at every collocation node.
  CVector on_grid(const Vec3 &source) const;
  complex operator()(const Vec3 &x, const Vec3 &source) const;
  std::vector<complex> evaluate(const std::vector<Vec3> &points, const Vec3 &source) const;
  // First Born term k^2 int g(x,z) (n0^2 - 1) g(z,y) dz with the same quadrature.
  complex born_term(const Vec3 &x, const Vec3 &source) const;

  const CollocationGrid &grid() const { return nodes; }
  bool zero_contrast() const { return trivial; }
  double wavenumber() const { return k; }

  // Kernel usable by the many-body scalar solvers. Caches the grid solution per source.
  KernelFn kernel() const;

private:
  complex correction(const Vec3 &x, const CVector &g_on_grid) const;

  double k = 0.0;
  CollocationGrid nodes;
  std::vector<complex> contrast;  // k^2 (n0^2 - 1) per node
  bool trivial = true;
  std::shared_ptr<DenseSolver> solver;
  CollocationOptions opts;
};

}  // namespace smallscat

#endif  // SMALLSCAT_EFFECTIVE_MEDIUM_HPP
