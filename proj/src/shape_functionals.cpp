// Copyright The smallscat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "smallscat/shape_functionals.hpp"

#include <cmath>

#include "smallscat/linalg.hpp"
#include "smallscat/potential_ops.hpp"

namespace smallscat
{

namespace
{

void check_lambda(double lambda)
{
  if (!(lambda > -1.0 && lambda <= 1.0))
  {
    throw ValidationError("invalid_argument", "lambda must lie in (-1, 1]");
  }
}

// Columns are sigma_1, sigma_2, sigma_3.
CMatrix solve_sigma_q(const SurfaceMesh &mesh, double lambda)
{
  check_lambda(lambda);
  const auto n = static_cast<Eigen::Index>(mesh.panel_count());
  CMatrix sigma = CMatrix::Zero(n, 3);
  if (lambda == 0.0)
  {
    return sigma;
  }
  const BoundaryOperatorMatrix a0 = assemble_A(mesh, 0.0);
  CMatrix system = -lambda * a0.entries;
  system.diagonal().array() += 1.0;
  CMatrix rhs(n, 3);
  for (Eigen::Index s = 0; s < n; ++s)
  {
    for (int q = 0; q < 3; ++q)
    {
      rhs(s, q) = -2.0 * lambda * mesh.panel_normal(s)[q];
    }
  }
  return DenseSolver(system).solve(rhs);
}

}  // namespace

double capacitance_zeroth(const SurfaceMesh &mesh)
{
  const std::size_t n = mesh.panel_count();
  const auto &c = mesh.panel_centroids();
  const auto &w = mesh.panel_areas();
  double denom = 0.0;
#pragma omp parallel for reduction(+ : denom) schedule(static)
  for (long s = 0; s < static_cast<long>(n); ++s)
  {
    double row = 2.0 * std::sqrt(pi * w[s]);  // int_disc dA / r
    for (std::size_t t = 0; t < n; ++t)
    {
      if (static_cast<std::size_t>(s) != t)
      {
        row += w[t] / (c[s] - c[t]).norm();
      }
    }
    denom += w[s] * row;
  }
  const double area = mesh.area();
  return 4.0 * pi * area * area / denom;
}

double capacitance_bem(const SurfaceMesh &mesh)
{
  const CMatrix s_mat = assemble_single_layer(mesh, 0.0);
  const auto n = static_cast<Eigen::Index>(mesh.panel_count());
  const CVector sigma = DenseSolver(s_mat).solve(CVector::Constant(n, -1.0));
  double charge = 0.0;
  for (Eigen::Index t = 0; t < n; ++t)
  {
    charge += sigma[t].real() * mesh.panel_area(t);
  }
  return -charge;
}

Mat3 polarizability_tensor(const SurfaceMesh &mesh, double lambda)
{
  const CMatrix sigma = solve_sigma_q(mesh, lambda);
  Mat3 beta = Mat3::Zero();
  if (lambda == 0.0)
  {
    return beta;
  }
  const Vec3 &origin = mesh.barycenter();
  for (std::size_t t = 0; t < mesh.panel_count(); ++t)
  {
    const Vec3 arm = mesh.panel_centroid(t) - origin;
    for (int p = 0; p < 3; ++p)
    {
      for (int q = 0; q < 3; ++q)
      {
        beta(p, q) += arm[p] * sigma(t, q).real() * mesh.panel_area(t);
      }
    }
  }
  return beta / mesh.volume();
}

CVec3 charge_Q_sigma_q(const SurfaceMesh &mesh, double lambda)
{
  const CMatrix sigma = solve_sigma_q(mesh, lambda);
  CVec3 total = CVec3::Zero();
  for (std::size_t t = 0; t < mesh.panel_count(); ++t)
  {
    total += sigma.row(t).transpose() * mesh.panel_area(t);
  }
  return total;
}

double transmission_lambda(double rho)
{
  if (!(rho > 0.0))
  {
    throw ValidationError("constraint_violation", "density ratio rho must be positive");
  }
  return (1.0 - rho) / (1.0 + rho);
}

ShapeFunctionals compute_shape_functionals(const SurfaceMesh &mesh, double lambda)
{
  ShapeFunctionals f;
  f.capacitance = capacitance_bem(mesh);
  f.polarizability = polarizability_tensor(mesh, lambda);
  f.lambda = lambda;
  f.volume = mesh.volume();
  f.area = mesh.area();
  return f;
}

}  // namespace smallscat
