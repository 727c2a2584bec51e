// Copyright The smallscat Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>
#include <sstream>

#include "smallscat/geometry.hpp"

using namespace smallscat;

namespace
{

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Surface area of the prolate spheroid with semi-axes (a, a, c), c > a.
double prolate_area(double a, double c)
{
  const double e = std::sqrt(1.0 - a * a / (c * c));
  return 2.0 * pi * a * a * (1.0 + c / (a * e) * std::asin(e));
}

Mat3 random_rotation(std::mt19937_64 &rng)
{
  std::normal_distribution<double> n;
  const Vec3 axis(n(rng), n(rng), n(rng));
  return rotation_matrix(axis, 2.0 * pi * std::uniform_real_distribution<double>()(rng));
}

}  // namespace

TEST_CASE("icosphere basics")
{
  const SurfaceMesh ico = make_sphere_mesh(1.0, 0);
  CHECK(ico.panel_count() == 20);
  CHECK(rel(ico.area(), 4 * pi) < 0.10);

  const SurfaceMesh s3 = make_sphere_mesh(1.0, 3);
  CHECK(s3.panel_count() == 1280);
  CHECK(rel(s3.area(), 4 * pi) < 0.002);
  CHECK(rel(s3.volume(), 4 * pi / 3) < 0.005);
  CHECK(s3.barycenter().norm() < 1e-12);
  CHECK(mesh_volume(s3) == doctest::Approx(s3.volume()));
  CHECK(mesh_area(s3) == doctest::Approx(s3.area()));

  CHECK_THROWS_AS(make_sphere_mesh(-1.0, 1), ValidationError);
}

TEST_CASE("panel areas scale with the square of the radius")
{
  const SurfaceMesh a = make_sphere_mesh(1.0, 2), b = make_sphere_mesh(2.0, 2);
  REQUIRE(a.panel_count() == b.panel_count());
  for (std::size_t i = 0; i < a.panel_count(); ++i)
    CHECK(b.panel_area(i) == doctest::Approx(4.0 * a.panel_area(i)).epsilon(1e-12));
}

TEST_CASE("ellipsoid meshes")
{
  const SurfaceMesh e = make_ellipsoid_mesh(Vec3(1, 1, 1), 3), s = make_sphere_mesh(1.0, 3);
  REQUIRE(e.vertices().size() == s.vertices().size());
  for (std::size_t i = 0; i < e.vertices().size(); ++i)
    CHECK((e.vertices()[i] - s.vertices()[i]).norm() < 1e-14);
  CHECK(e.panels() == s.panels());

  const SurfaceMesh p = make_ellipsoid_mesh(Vec3(1, 1, 2), 3);
  CHECK(rel(p.volume(), 8 * pi / 3) < 0.005);
  CHECK(prolate_area(1, 2) == doctest::Approx(21.48).epsilon(1e-3));
  CHECK(rel(p.area(), prolate_area(1, 2)) < 0.01);

  // (2,1,1) turned by 90 degrees about z has the extent and moments of (1,2,1).
  const SurfaceMesh x = make_ellipsoid_mesh(Vec3(2, 1, 1), 3);
  const SurfaceMesh y = make_ellipsoid_mesh(Vec3(1, 2, 1), 3);
  const SurfaceMesh xr = x.transformed(rotation_matrix(Vec3(0, 0, 1), pi / 2));
  CHECK(rel(x.volume(), y.volume()) < 1e-12);
  CHECK(rel(x.area(), y.area()) < 1e-12);
  const Box bx = xr.bounding_box(), by = y.bounding_box();
  CHECK((bx.lo - by.lo).norm() < 1e-12);
  CHECK((bx.hi - by.hi).norm() < 1e-12);
  CHECK(rel(xr.volume(), y.volume()) < 1e-12);
}

TEST_CASE("homogeneity under scaling")
{
  const SurfaceMesh m = make_ellipsoid_mesh(Vec3(1, 0.7, 0.4), 2);
  for (double s : {0.01, 0.5, 3.0})
  {
    const SurfaceMesh t = m.scaled(s);
    CHECK(t.volume() == doctest::Approx(s * s * s * m.volume()).epsilon(1e-12));
    CHECK(t.area() == doctest::Approx(s * s * m.area()).epsilon(1e-12));
    CHECK(t.size() == doctest::Approx(s * m.size()).epsilon(1e-12));
  }
}

TEST_CASE("rotation invariance of volume and area")
{
  std::mt19937_64 rng(11);
  const SurfaceMesh m = make_cube_mesh(1.3, 4);
  for (int trial = 0; trial < 5; ++trial)
  {
    const SurfaceMesh r = m.transformed(random_rotation(rng), Vec3(0.3, -2, 1));
    CHECK(std::abs(r.volume() - m.volume()) < 1e-12);
    CHECK(std::abs(r.area() - m.area()) < 1e-12);
  }
}

TEST_CASE("area error is non-increasing under refinement")
{
  double last_s = 1e9, last_e = 1e9;
  for (int r = 0; r <= 4; ++r)
  {
    const double es = std::abs(make_sphere_mesh(1.0, r).area() - 4 * pi);
    const double ee = std::abs(make_ellipsoid_mesh(Vec3(1, 1, 2), r).area() - prolate_area(1, 2));
    CHECK(es <= last_s + 1e-12);
    CHECK(ee <= last_e);
    last_s = es;
    last_e = ee;
  }
}

TEST_CASE("cube mesh")
{
  const SurfaceMesh c = make_cube_mesh(2.0, 3);
  CHECK(c.volume() == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(c.area() == doctest::Approx(24.0).epsilon(1e-12));
  CHECK(c.size() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("volume grid")
{
  const SurfaceMesh s = make_sphere_mesh(1.0, 3);
  const VolumeGrid g20 = make_volume_grid(s, 20);
  CHECK(rel(g20.total_volume(), 4 * pi / 3) < 0.02);
  const VolumeGrid g10 = make_volume_grid(s, 10);
  const VolumeGrid g40 = make_volume_grid(s, 40);
  const double e10 = std::abs(g10.total_volume() - s.volume());
  const double e20 = std::abs(g20.total_volume() - s.volume());
  const double e40 = std::abs(g40.total_volume() - s.volume());
  CHECK(e20 < e10);
  CHECK(e40 < e20);

  const VolumeGrid ge = make_volume_grid(make_ellipsoid_mesh(Vec3(1, 1, 2), 3), 20);
  for (const Vec3 &p : ge.cells)
    CHECK(p.x() * p.x() + p.y() * p.y() + p.z() * p.z() / 4 <= 1.0);
}

TEST_CASE("mesh file round trip and diagnostics")
{
  const SurfaceMesh m = make_sphere_mesh(0.5, 1);
  std::stringstream io;
  write_mesh(io, m);
  const SurfaceMesh r = read_mesh(io);
  CHECK(r.panel_count() == m.panel_count());
  CHECK(r.volume() == doctest::Approx(m.volume()).epsilon(1e-12));

  // A tetrahedron with one face missing: the open edges must be reported.
  std::istringstream open("4 4\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n0 2 1\n0 1 3\n0 3 2\n0 3 2\n");
  try
  {
    read_mesh(open);
    FAIL("expected a watertightness error");
  }
  catch (const ValidationError &e)
  {
    CHECK(e.code() == "mesh_not_watertight");
    CHECK(std::string(e.what()).find("edge") != std::string::npos);
  }

  std::istringstream tet("4 4\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n0 2 1\n0 1 3\n0 3 2\n1 2 3\n");
  const SurfaceMesh t = read_mesh(tet);
  CHECK(t.volume() == doctest::Approx(1.0 / 6.0).epsilon(1e-12));

  std::istringstream garbage("3 x\n");
  CHECK_THROWS_AS(read_mesh(garbage), ValidationError);
  CHECK_THROWS_AS(read_mesh_file("/nonexistent/mesh.txt"), ValidationError);
}

TEST_CASE("meshes are immutable values safe to share")
{
  const SurfaceMesh m = make_sphere_mesh(1.0, 2);
  double total = 0.0;
#pragma omp parallel for reduction(+ : total)
  for (int i = 0; i < 8; ++i)
    total += m.winding_number(Vec3(0.1 * i, 0, 0));
  CHECK(total == doctest::Approx(8.0).epsilon(1e-9));
}
