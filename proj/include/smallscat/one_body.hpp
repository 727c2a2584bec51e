// Copyright The smallscat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SMALLSCAT_ONE_BODY_HPP
#define SMALLSCAT_ONE_BODY_HPP

#include <string>

#include "smallscat/incident.hpp"
#include "smallscat/shape_functionals.hpp"
#include "smallscat/types.hpp"

namespace smallscat
{

enum class BoundaryCondition
{
  dirichlet,
  impedance,
  neumann,
  transmission
};

std::string to_string(BoundaryCondition bc);
BoundaryCondition boundary_condition_from_string(const std::string &name);

//
// Leading-order description of the field scattered by one small body centered at `center`:
//
//   u(x) = u0(x) + g(x, center) (Q - ik beta.dipole + volume_term),  beta = (x-center)/|x-center|
//
// so the scattering amplitude is (Q - ik beta.dipole + volume_term) / (4 pi).
//
struct OneBodyResult
{
  BoundaryCondition bc = BoundaryCondition::dirichlet;
  complex charge = 0.0;              // Q = int sigma
  CVec3 dipole = CVec3::Zero();      // int (t - center) sigma dt
  complex volume_term = 0.0;         // kappa u(x1) V1, transmission only
  double k = 0.0;
  Vec3 center = Vec3::Zero();
  double size = 0.0;                 // a = half diameter
  IncidentField incident;

  // Q1 = int e^{-ik beta.t} sigma dt to first order in ka.
  complex far_field_moment(const Vec3 &beta) const;
  complex amplitude(const Vec3 &beta) const;
};

// -C u0(center) / (4 pi).
complex amplitude_dirichlet(double capacitance, complex u0_at_center);

// -zeta |S| u0(center) / (4 pi); requires Im zeta <= 0.
complex amplitude_impedance(complex zeta, double area, complex u0_at_center);

// |D| / (4 pi) (ik beta_pq beta_p du0/dx_q + Laplacian u0), beta_pq taken at lambda = 1.
complex amplitude_neumann(double volume, const Mat3 &polarizability, double k,
                          const LocalField &u0_at_center, const Vec3 &beta);

OneBodyResult one_body_dirichlet(double capacitance, double k, const IncidentField &incident,
                                 const Vec3 &center, double size);
OneBodyResult one_body_impedance(complex zeta, double area, double k,
                                 const IncidentField &incident, const Vec3 &center, double size);
OneBodyResult one_body_neumann(double volume, const Mat3 &polarizability, double k,
                               const IncidentField &incident, const Vec3 &center, double size);

// Transmission body with density ratio rho and interior wavenumber k1. The functionals must
// carry the polarizability at lambda = (1 - rho) / (1 + rho).
OneBodyResult one_body_transmission(const ShapeFunctionals &functionals, double rho, double k,
                                    double k1, const IncidentField &incident, const Vec3 &center,
                                    double size);

// Total field u0(x) + g(x, center) * 4 pi A(beta). Warns when |x - center| < 5a.
complex scattered_field_one_body(const OneBodyResult &result, const Vec3 &x);

}  // namespace smallscat

#endif  // SMALLSCAT_ONE_BODY_HPP
