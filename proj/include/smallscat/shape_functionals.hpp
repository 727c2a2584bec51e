// Copyright The smallscat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SMALLSCAT_SHAPE_FUNCTIONALS_HPP
#define SMALLSCAT_SHAPE_FUNCTIONALS_HPP

#include "smallscat/geometry.hpp"
#include "smallscat/types.hpp"

namespace smallscat
{

//
// Shape data that determines small-body scattering. Capacitance uses the epsilon0 = 1
// convention, so a ball of radius a has capacitance 4 pi a.
//
struct ShapeFunctionals
{
  double capacitance = 0.0;
  Mat3 polarizability = Mat3::Zero();
  double lambda = 1.0;
  double volume = 0.0;
  double area = 0.0;
};

// 4 pi |S|^2 / int int ds dt / r_st with disc-regularized self-panel terms.
double capacitance_zeroth(const SurfaceMesh &mesh);

// Total charge of the conductor held at unit potential (first-kind single-layer solve).
double capacitance_bem(const SurfaceMesh &mesh);

// beta_pq(lambda) = V^{-1} int t_p sigma_q(t) dt with (I - lambda A0) sigma_q = -2 lambda N_q,
// t measured from the barycenter. lambda in (-1, 1].
Mat3 polarizability_tensor(const SurfaceMesh &mesh, double lambda);

// Surface integrals of sigma_q; zero in the continuum, used as a discretization diagnostic.
CVec3 charge_Q_sigma_q(const SurfaceMesh &mesh, double lambda);

// Contrast parameter lambda = (1 - rho) / (1 + rho) of a transmission body.
double transmission_lambda(double rho);

ShapeFunctionals compute_shape_functionals(const SurfaceMesh &mesh, double lambda = 1.0);

}  // namespace smallscat

#endif  // SMALLSCAT_SHAPE_FUNCTIONALS_HPP
