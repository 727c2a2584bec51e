// Copyright The smallscat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SMALLSCAT_BEM_ORACLE_HPP
#define SMALLSCAT_BEM_ORACLE_HPP

#include <vector>

#include "smallscat/geometry.hpp"
#include "smallscat/incident.hpp"
#include "smallscat/one_body.hpp"
#include "smallscat/potential_ops.hpp"

namespace smallscat
{

struct BemOptions
{
  // Largest admissible k * a, a = half the largest body diameter.
  double max_ka = 0.5;
  // Reciprocal condition estimate below which a solve is reported as failed.
  double min_rcond = 1e-13;
};

//
// Discretized solution of the full boundary-value problem. The scattered field is
//   v(x) = sum over panels g(x,t) sigma(t) w_t + kappa sum over cells g(x,y) u(y) vol,
// the volume part being present for transmission bodies only.
//
struct BemSolution
{
  BoundaryCondition bc = BoundaryCondition::dirichlet;
  double k = 0.0;
  complex kappa = 0.0;
  std::vector<SurfaceMesh> meshes;
  PanelSet panels;
  CVector density;
  VolumeGrid grid;
  CVector interior_values;
  IncidentField incident;
  double rcond = 0.0;
  double residual = 0.0;
  // max |rho u_N(inside) - u_N(outside)| on panels, transmission only.
  double interface_residual = 0.0;

  PanelDensity body_density(std::size_t body) const;
  complex total_charge(std::size_t body) const;
};

// First-kind single-layer system int g(s,t) sigma(t) dt = -u0(s) on every body.
BemSolution solve_dirichlet_bem(const std::vector<SurfaceMesh> &meshes, double k,
                                const IncidentField &incident, const BemOptions &options = {});

// (A sigma - sigma)/2 - zeta S sigma = -u0_N + zeta u0 on every body; Im zeta <= 0.
BemSolution solve_impedance_bem(const std::vector<SurfaceMesh> &meshes, double k, complex zeta,
                                const IncidentField &incident, const BemOptions &options = {});

// Impedance system with zeta = 0.
BemSolution solve_neumann_bem(const std::vector<SurfaceMesh> &meshes, double k,
                              const IncidentField &incident, const BemOptions &options = {});

// Coupled surface/volume system for one penetrable body: sigma on panels and u on cells.
BemSolution solve_transmission_bem(const SurfaceMesh &mesh, const VolumeGrid &grid, double k,
                                   double k1, double rho, const IncidentField &incident,
                                   const BemOptions &options = {});

// A(beta) = (1/4pi) [sum e^{-ik beta.t} sigma w + kappa sum e^{-ik beta.y} u vol].
complex far_field(const BemSolution &solution, const Vec3 &beta);
std::vector<complex> far_field(const BemSolution &solution, const std::vector<Vec3> &directions);

// Total field u0 + v at a point off the surfaces.
complex evaluate_bem_field(const BemSolution &solution, const Vec3 &x);

}  // namespace smallscat

#endif  // SMALLSCAT_BEM_ORACLE_HPP
