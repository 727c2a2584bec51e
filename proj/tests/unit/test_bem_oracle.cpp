// Copyright The smallscat Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "smallscat/bem_oracle.hpp"
#include "smallscat/geometry.hpp"
#include "smallscat/one_body.hpp"
#include "smallscat/shape_functionals.hpp"

using namespace smallscat;

namespace
{

double rel(complex a, complex b) { return std::abs(a - b) / std::abs(b); }

IncidentField constant_field(complex c)
{
  return IncidentField::custom([c](const Vec3 &) { return c; },
                               [](const Vec3 &) { return CVec3::Zero().eval(); },
                               [](const Vec3 &) { return complex(0.0); });
}

}  // namespace

TEST_CASE("static dirichlet solve reproduces the capacitance")
{
  const SurfaceMesh s = make_sphere_mesh(1.0, 2);
  const BemSolution sol = solve_dirichlet_bem({s}, 0.0, constant_field(1.0));
  CHECK(rel(sol.total_charge(0), -capacitance_bem(s)) < 1e-10);
  CHECK(sol.rcond > 0.0);
  CHECK(sol.residual < 1e-10);
}

TEST_CASE("dirichlet far field of a sphere is isotropic")
{
  const SurfaceMesh s = make_sphere_mesh(1.0, 2);
  const BemSolution sol = solve_dirichlet_bem({s}, 0.1, IncidentField::plane_wave(Vec3(0, 0, 1), 0.1));
  const complex ref = far_field(sol, Vec3(0, 0, 1));
  for (const Vec3 &b : {Vec3(1, 0, 0), Vec3(0, 0, -1), Vec3(0, 0.8, -0.6)})
    CHECK(rel(far_field(sol, b), ref) < 0.05);
}

TEST_CASE("well separated bodies barely interact")
{
  const SurfaceMesh a = make_sphere_mesh(1.0, 2, Vec3(-50, 0, 0));
  const SurfaceMesh b = make_sphere_mesh(1.0, 2, Vec3(50, 0, 0));
  const double k = 0.05;
  const IncidentField pw = IncidentField::plane_wave(Vec3(1, 0, 0), k);
  const BemSolution both = solve_dirichlet_bem({a, b}, k, pw, BemOptions{0.5, 1e-13});
  const BemSolution only_a = solve_dirichlet_bem({a}, k, pw);
  const BemSolution only_b = solve_dirichlet_bem({b}, k, pw);
  CHECK(rel(both.total_charge(0), only_a.total_charge(0)) < 0.02);
  CHECK(rel(both.total_charge(1), only_b.total_charge(0)) < 0.02);
}

TEST_CASE("impedance system")
{
  const SurfaceMesh s = make_sphere_mesh(1.0, 2);
  const double k = 0.2;
  const IncidentField pw = IncidentField::plane_wave(Vec3(0, 1, 0), k);
  const BemSolution z0 = solve_impedance_bem({s}, k, 0.0, pw);
  const BemSolution nm = solve_neumann_bem({s}, k, pw);
  CHECK((z0.density - nm.density).norm() <= 1e-14 * nm.density.norm());

  // Small sphere, zeta = 1, ka = 0.05: Q = -zeta |S| u0(0) to leading order.
  const SurfaceMesh small = make_sphere_mesh(0.05, 3);
  const BemSolution sol = solve_impedance_bem({small}, 1.0, 1.0,
                                              IncidentField::plane_wave(Vec3(0, 0, 1), 1.0));
  CHECK(rel(sol.total_charge(0), -small.area()) < 0.10);

  // Linearity in the incident amplitude.
  const complex amp(2.0, -0.5);
  const BemSolution scaled = solve_impedance_bem({s}, k, complex(0.3, -0.1), pw.scaled(amp));
  const BemSolution unit = solve_impedance_bem({s}, k, complex(0.3, -0.1), pw);
  CHECK((scaled.density - amp * unit.density).norm() <= 1e-12 * scaled.density.norm());

  CHECK_THROWS_AS(solve_impedance_bem({s}, k, complex(1, 0.5), pw), ValidationError);
}

TEST_CASE("superposition of incident waves")
{
  const SurfaceMesh s = make_ellipsoid_mesh(Vec3(1, 0.7, 0.5), 2);
  const double k = 0.3;
  const IncidentField p1 = IncidentField::plane_wave(Vec3(0, 0, 1), k);
  const IncidentField p2 = IncidentField::plane_wave(Vec3(1, 1, 0), k, complex(0, 1));
  const BemSolution sum = solve_neumann_bem({s}, k, p1 + p2);
  const BemSolution a = solve_neumann_bem({s}, k, p1);
  const BemSolution b = solve_neumann_bem({s}, k, p2);
  CHECK((sum.density - a.density - b.density).norm() <= 1e-12 * sum.density.norm());
}

TEST_CASE("transparent transmission body")
{
  const SurfaceMesh s = make_sphere_mesh(1.0, 2);
  const VolumeGrid g = make_volume_grid(s, 8);
  const double k = 0.3;
  const IncidentField pw = IncidentField::plane_wave(Vec3(0, 0, 1), k);
  const BemSolution sol = solve_transmission_bem(s, g, k, k, 1.0, pw);
  CHECK(sol.density.cwiseAbs().maxCoeff() < 1e-12);
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(std::abs(sol.interior_values[static_cast<Eigen::Index>(i)] - pw.value(g.cells[i])) < 1e-12);
  CHECK(sol.interface_residual < 1e-10);
}

TEST_CASE("far field of a point-like charge")
{
  const SurfaceMesh tiny = make_sphere_mesh(1e-4, 1);
  BemSolution sol = solve_dirichlet_bem({tiny}, 1.0, IncidentField::plane_wave(Vec3(0, 0, 1), 1.0));
  const complex q(0.3, -0.7);
  sol.density.setConstant(q / tiny.area());
  for (const Vec3 &b : {Vec3(0, 0, 1), Vec3(1, 0, 0), Vec3(0, -0.6, 0.8)})
    CHECK(rel(far_field(sol, b), q / (4 * pi)) < 1e-6);
}

TEST_CASE("hard sphere far field against the Rayleigh limit")
{
  const SurfaceMesh s = make_sphere_mesh(1.0, 3);
  const double k = 0.05;
  const BemSolution sol = solve_neumann_bem({s}, k, IncidentField::plane_wave(Vec3(0, 0, 1), k));
  for (double theta : {0.0, pi / 3, pi / 2, 2 * pi / 3, pi})
  {
    const Vec3 b(std::sin(theta), 0, std::cos(theta));
    const complex rayleigh = -(k * k / 3) * (1 - 1.5 * std::cos(theta));
    CAPTURE(theta);
    CHECK(rel(far_field(sol, b), rayleigh) < 0.05);
  }
}

TEST_CASE("reciprocity of the discrete oracle")
{
  const SurfaceMesh e = make_ellipsoid_mesh(Vec3(1, 0.6, 0.4), 2)
                            .transformed(rotation_matrix(Vec3(1, 1, 0), 0.6));
  const double k = 0.4;
  const Vec3 alpha = Vec3(0, 0, 1), beta = Vec3(0.6, 0, 0.8);
  for (int bc = 0; bc < 2; ++bc)
  {
    auto solve = [&](const Vec3 &dir) {
      const IncidentField pw = IncidentField::plane_wave(dir, k);
      return bc == 0 ? solve_dirichlet_bem({e}, k, pw) : solve_neumann_bem({e}, k, pw);
    };
    const complex forward = far_field(solve(alpha), beta);
    const complex backward = far_field(solve(-beta), -alpha);
    CHECK(std::abs(std::abs(forward) - std::abs(backward)) < 0.02 * std::abs(forward));
  }
}

TEST_CASE("oracle and asymptotics converge as ka decreases")
{
  const SurfaceMesh s = make_sphere_mesh(1.0, 2);
  const ShapeFunctionals f = compute_shape_functionals(s);
  const ShapeFunctionals ft = compute_shape_functionals(s, transmission_lambda(0.5));
  const VolumeGrid g = make_volume_grid(s, 8);
  const Vec3 b(0.6, 0, 0.8);
  const complex zeta(0.1, -0.05);
  std::array<double, 4> prev;
  prev.fill(1e9);
  for (double ka : {0.2, 0.1, 0.05})
  {
    const IncidentField pw = IncidentField::plane_wave(Vec3(0, 0, 1), ka);
    const Vec3 c = Vec3::Zero();
    const std::array<double, 4> err{
        rel(far_field(solve_dirichlet_bem({s}, ka, pw), b),
            one_body_dirichlet(f.capacitance, ka, pw, c, 1).amplitude(b)),
        rel(far_field(solve_impedance_bem({s}, ka, zeta, pw), b),
            one_body_impedance(zeta, f.area, ka, pw, c, 1).amplitude(b)),
        rel(far_field(solve_neumann_bem({s}, ka, pw), b),
            one_body_neumann(f.volume, f.polarizability, ka, pw, c, 1).amplitude(b)),
        rel(far_field(solve_transmission_bem(s, g, ka, 1.2 * ka, 0.5, pw), b),
            one_body_transmission(ft, 0.5, ka, 1.2 * ka, pw, c, 1).amplitude(b))};
    for (int i = 0; i < 4; ++i)
    {
      CAPTURE(i);
      CAPTURE(ka);
      CHECK(err[i] < prev[i]);
    }
    prev = err;
  }
}

TEST_CASE("validity limit")
{
  const SurfaceMesh s = make_sphere_mesh(1.0, 1);
  try
  {
    solve_dirichlet_bem({s}, 2.0, IncidentField::plane_wave(Vec3(0, 0, 1), 2.0));
    FAIL("expected the validity check to fire");
  }
  catch (const ValidationError &e)
  {
    CHECK(e.code() == "validity_limit");
  }
}
