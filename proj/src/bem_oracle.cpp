// Copyright The smallscat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "smallscat/bem_oracle.hpp"

#include <cmath>
#include <sstream>

#include "smallscat/linalg.hpp"
#include "smallscat/shape_functionals.hpp"

namespace smallscat
{

namespace
{

std::vector<const SurfaceMesh *> pointers(const std::vector<SurfaceMesh> &meshes)
{
  std::vector<const SurfaceMesh *> out;
  for (const auto &m : meshes)
  {
    out.push_back(&m);
  }
  return out;
}

void check_setup(const std::vector<SurfaceMesh> &meshes, double k, const BemOptions &options)
{
  if (meshes.empty())
  {
    throw ValidationError("invalid_argument", "at least one body is required");
  }
  if (!(k >= 0.0))
  {
    throw ValidationError("invalid_argument", "wavenumber must be non-negative");
  }
  double a = 0.0;
  for (const auto &m : meshes)
  {
    a = std::max(a, m.size());
  }
  if (k * a > options.max_ka)
  {
    std::ostringstream os;
    os << "ka = " << k * a << " exceeds the oracle validity limit " << options.max_ka;
    throw ValidationError("validity_limit", os.str());
  }
}

double relative_residual(const CMatrix &m, const CVector &x, const CVector &b)
{
  const double bn = b.norm();
  return bn > 0.0 ? (m * x - b).norm() / bn : (m * x).norm();
}

CVector solve_checked(const CMatrix &system, const CVector &rhs, const BemOptions &options,
                      BemSolution &out)
{
  DenseSolver solver(system, options.min_rcond);
  CVector x = solver.solve(rhs);
  out.rcond = solver.rcond();
  out.residual = relative_residual(system, x, rhs);
  return x;
}

}  // namespace

PanelDensity BemSolution::body_density(std::size_t body) const
{
  const auto begin = static_cast<Eigen::Index>(panels.offset.at(body));
  const auto end = static_cast<Eigen::Index>(panels.offset.at(body + 1));
  return density.segment(begin, end - begin);
}

complex BemSolution::total_charge(std::size_t body) const
{
  complex q = 0.0;
  for (std::size_t t = panels.offset.at(body); t < panels.offset.at(body + 1); ++t)
  {
    q += density[t] * panels.area[t];
  }
  return q;
}

BemSolution solve_dirichlet_bem(const std::vector<SurfaceMesh> &meshes, double k,
                                const IncidentField &incident, const BemOptions &options)
{
  check_setup(meshes, k, options);
  BemSolution out;
  out.bc = BoundaryCondition::dirichlet;
  out.k = k;
  out.meshes = meshes;
  out.panels = make_panel_set(pointers(out.meshes));
  out.incident = incident;

  const CMatrix s_mat = assemble_single_layer(out.panels, k);
  CVector rhs(out.panels.size());
  for (std::size_t s = 0; s < out.panels.size(); ++s)
  {
    rhs[s] = -incident.value(out.panels.centroid[s]);
  }
  out.density = solve_checked(s_mat, rhs, options, out);
  return out;
}

BemSolution solve_impedance_bem(const std::vector<SurfaceMesh> &meshes, double k, complex zeta,
                                const IncidentField &incident, const BemOptions &options)
{
  check_setup(meshes, k, options);
  if (zeta.imag() > 0.0)
  {
    throw ValidationError("constraint_violation", "impedance must satisfy Im zeta <= 0");
  }
  BemSolution out;
  out.bc = zeta == 0.0 ? BoundaryCondition::neumann : BoundaryCondition::impedance;
  out.k = k;
  out.meshes = meshes;
  out.panels = make_panel_set(pointers(out.meshes));
  out.incident = incident;

  const auto n = static_cast<Eigen::Index>(out.panels.size());
  CMatrix system = 0.5 * assemble_A(out.panels, k).entries;
  system.diagonal().array() -= 0.5;
  if (zeta != 0.0)
  {
    system -= zeta * assemble_single_layer(out.panels, k);
  }
  CVector rhs(n);
  for (Eigen::Index s = 0; s < n; ++s)
  {
    const Vec3 &x = out.panels.centroid[s];
    const complex u0n = out.panels.normal[s].cast<complex>().dot(incident.gradient(x));
    rhs[s] = -u0n + zeta * incident.value(x);
  }
  out.density = solve_checked(system, rhs, options, out);
  return out;
}

BemSolution solve_neumann_bem(const std::vector<SurfaceMesh> &meshes, double k,
                              const IncidentField &incident, const BemOptions &options)
{
  return solve_impedance_bem(meshes, k, 0.0, incident, options);
}

BemSolution solve_transmission_bem(const SurfaceMesh &mesh, const VolumeGrid &grid, double k,
                                   double k1, double rho, const IncidentField &incident,
                                   const BemOptions &options)
{
  check_setup({mesh}, k, options);
  const double lambda = transmission_lambda(rho);
  if (!(k1 > 0.0))
  {
    throw ValidationError("invalid_argument", "interior wavenumber must be positive");
  }
  if (grid.size() == 0)
  {
    throw ValidationError("invalid_argument", "transmission oracle needs a volume grid");
  }
  BemSolution out;
  out.bc = BoundaryCondition::transmission;
  out.k = k;
  out.kappa = k1 * k1 - k * k;
  out.meshes = {mesh};
  out.panels = make_panel_set({&out.meshes.front()});
  out.grid = grid;
  out.incident = incident;

  const auto np = static_cast<Eigen::Index>(out.panels.size());
  const auto nc = static_cast<Eigen::Index>(grid.size());
  const complex kappa = out.kappa;
  const SurfaceMesh &body = out.meshes.front();

  CMatrix system = CMatrix::Zero(np + nc, np + nc);
  CVector rhs(np + nc);

  // sigma - lambda A sigma - 2 lambda B1 u = 2 lambda u0_N on panels.
  const CMatrix a_mat = assemble_A(out.panels, k).entries;
  system.topLeftCorner(np, np) = -lambda * a_mat;
  system.topLeftCorner(np, np).diagonal().array() += 1.0;
#pragma omp parallel for schedule(static)
  for (Eigen::Index s = 0; s < np; ++s)
  {
    const Vec3 &xs = out.panels.centroid[s];
    const CVec3 ns = out.panels.normal[s].cast<complex>();
    for (Eigen::Index c = 0; c < nc; ++c)
    {
      system(s, np + c) = -2.0 * lambda * kappa *
                          ns.dot(cell_potential_gradient(xs, grid.cells[c], grid.cell_volume, k));
    }
    rhs[s] = 2.0 * lambda * ns.dot(incident.gradient(xs));
  }

  // u - S sigma - kappa V u = u0 on cells.
#pragma omp parallel for schedule(dynamic, 16)
  for (Eigen::Index c = 0; c < nc; ++c)
  {
    const Vec3 &y = grid.cells[c];
    for (Eigen::Index t = 0; t < np; ++t)
    {
      system(np + c, t) = -panel_integral_g(body, static_cast<std::size_t>(t), y, k);
    }
    for (Eigen::Index c2 = 0; c2 < nc; ++c2)
    {
      system(np + c, np + c2) = -kappa * cell_potential(y, grid.cells[c2], grid.cell_volume, k);
    }
    system(np + c, np + c) += 1.0;
    rhs[np + c] = incident.value(y);
  }

  const CVector x = solve_checked(system, rhs, options, out);
  out.density = x.head(np);
  out.interior_values = x.tail(nc);

  // Flux continuity rho u_N(inside) - u_N(outside), with the one-sided limits of the
  // single-layer normal derivative (A sigma +- sigma)/2.
  const CVector a_sigma = a_mat * out.density;
  const PanelDensity b1u =
      normal_derivative_volume_potential(grid, out.interior_values, k, kappa, body);
  double worst = 0.0;
  for (Eigen::Index s = 0; s < np; ++s)
  {
    const complex u0n =
        out.panels.normal[s].cast<complex>().dot(incident.gradient(out.panels.centroid[s]));
    const complex inside = u0n + 0.5 * (a_sigma[s] + out.density[s]) + b1u[s];
    const complex outside = u0n + 0.5 * (a_sigma[s] - out.density[s]) + b1u[s];
    worst = std::max(worst, std::abs(rho * inside - outside));
  }
  out.interface_residual = worst;
  return out;
}

complex far_field(const BemSolution &solution, const Vec3 &beta)
{
  const Vec3 b = beta.normalized();
  const double k = solution.k;
  complex sum = 0.0;
  for (std::size_t t = 0; t < solution.panels.size(); ++t)
  {
    sum += std::exp(-I * (k * b.dot(solution.panels.centroid[t]))) * solution.density[t] *
           solution.panels.area[t];
  }
  if (solution.bc == BoundaryCondition::transmission)
  {
    complex vol = 0.0;
    for (std::size_t c = 0; c < solution.grid.size(); ++c)
    {
      vol += std::exp(-I * (k * b.dot(solution.grid.cells[c]))) * solution.interior_values[c];
    }
    sum += solution.kappa * vol * solution.grid.cell_volume;
  }
  return sum / (4.0 * pi);
}

std::vector<complex> far_field(const BemSolution &solution, const std::vector<Vec3> &directions)
{
  std::vector<complex> out;
  out.reserve(directions.size());
  for (const auto &d : directions)
  {
    out.push_back(far_field(solution, d));
  }
  return out;
}

complex evaluate_bem_field(const BemSolution &solution, const Vec3 &x)
{
  complex v = 0.0;
  for (std::size_t b = 0; b < solution.meshes.size(); ++b)
  {
    const SurfaceMesh &mesh = solution.meshes[b];
    const std::size_t base = solution.panels.offset[b];
    for (std::size_t t = 0; t < mesh.panel_count(); ++t)
    {
      v += panel_integral_g(mesh, t, x, solution.k) * solution.density[base + t];
    }
  }
  if (solution.bc == BoundaryCondition::transmission)
  {
    for (std::size_t c = 0; c < solution.grid.size(); ++c)
    {
      v += solution.kappa *
           cell_potential(x, solution.grid.cells[c], solution.grid.cell_volume, solution.k) *
           solution.interior_values[c];
    }
  }
  return solution.incident.value(x) + v;
}

}  // namespace smallscat
