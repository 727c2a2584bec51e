// Copyright The smallscat Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstring>

#include "smallscat/bem_oracle.hpp"
#include "smallscat/geometry.hpp"
#include "smallscat/many_body.hpp"
#include "smallscat/one_body.hpp"
#include "smallscat/potential_ops.hpp"
#include "smallscat/shape_functionals.hpp"

using namespace smallscat;

namespace
{

double rel(complex a, complex b) { return std::abs(a - b) / std::abs(b); }

CloudOptions options(BoundaryCondition bc, double a)
{
  CloudOptions o;
  o.box = Box{Vec3(-1, -1, -1), Vec3(1, 1, 1)};
  o.a = a;
  o.bc = bc;
  return o;
}

// Two equal particles with coupling coefficient c: u1 = u01 + c g u2, u2 = u02 + c g u1.
std::pair<complex, complex> two_by_two(complex u01, complex u02, complex cg)
{
  const complex det = 1.0 - cg * cg;
  return {(u01 + cg * u02) / det, (u02 + cg * u01) / det};
}

}  // namespace

TEST_CASE("cloud generation follows the placement law")
{
  CloudOptions o;
  o.box = Box{Vec3::Zero(), Vec3::Ones()};
  o.a = 0.001;
  o.density = 0.0;
  CHECK(generate_cloud(o).size() == 0);

  o.density = 1.0;
  const ParticleCloud c1 = generate_cloud(o);
  CHECK(std::abs(static_cast<double>(c1.size()) - 1000.0) <= 10.0);
  CHECK(c1.min_separation() >= 5 * o.a);
  for (const Vec3 &x : c1.centers)
    CHECK(o.box.contains(x));

  o.density = 2.0;
  const ParticleCloud c2 = generate_cloud(o);
  CHECK(std::abs(static_cast<double>(c2.size()) - 2.0 * c1.size()) <= 20.0);

  // Same seed, same bytes; a new seed moves the particles.
  const ParticleCloud again = generate_cloud(o);
  REQUIRE(again.size() == c2.size());
  CHECK(std::memcmp(again.centers.data(), c2.centers.data(), c2.size() * sizeof(Vec3)) == 0);
  o.seed = 99;
  CHECK(generate_cloud(o).centers != c2.centers);
}

TEST_CASE("placement rejects impossible densities")
{
  CloudOptions o;
  o.box = Box{Vec3::Zero(), Vec3::Ones()};
  o.a = 0.001;
  o.density = ScalarField::from_string("1 + 4000*exp(-100*((x-0.5)^2+(y-0.5)^2+(z-0.5)^2))");
  o.min_separation = 0.05;
  try
  {
    generate_cloud(o);
    FAIL("expected density_too_high");
  }
  catch (const ValidationError &e)
  {
    CHECK(e.code() == "density_too_high");
    CHECK(std::string(e.what()).find("cell") != std::string::npos);
  }
  o.density = -1.0;
  CHECK_THROWS_AS(generate_cloud(o), ValidationError);
}

TEST_CASE("dirichlet system")
{
  const double k = 0.8, a = 0.01;
  const IncidentField pw = IncidentField::plane_wave(Vec3(0.6, 0, 0.8), k);

  CloudOptions o = options(BoundaryCondition::dirichlet, a);
  const ParticleCloud one = make_cloud({Vec3(0.1, 0.2, 0.3)}, o);
  CHECK(solve_las_dirichlet(one, k, pw).values[0] == pw.value(one.centers[0]));

  // Two particles with C = 4 pi a: closed-form 2x2 solve.
  const Vec3 x1(-0.2, 0, 0), x2(0.3, 0.1, 0);
  const ParticleCloud two = make_cloud({x1, x2}, o);
  REQUIRE(two.capacitance[0] == doctest::Approx(4 * pi * a));
  const EffectiveFieldSolution sol = solve_las_dirichlet(two, k, pw);
  const auto [u1, u2] = two_by_two(pw.value(x1), pw.value(x2), -4 * pi * a * kernel_g(x1, x2, k));
  CHECK(std::abs(sol.values[0] - u1) < 1e-14);
  CHECK(std::abs(sol.values[1] - u2) < 1e-14);

  // Field at a probe: the two-term sum written out.
  const Vec3 p(1.5, -0.5, 2.0);
  const complex direct =
      pw.value(p) - 4 * pi * a * (kernel_g(p, x1, k) * u1 + kernel_g(p, x2, k) * u2);
  CHECK(std::abs(evaluate_field(two, sol, p) - direct) < 1e-14);

  // Vanishing capacitance: nothing scatters.
  o.capacitance_density = 1e-14;
  const ParticleCloud faint = make_cloud({x1, x2}, o);
  const EffectiveFieldSolution fs = solve_las_dirichlet(faint, k, pw);
  CHECK(std::abs(fs.values[0] - pw.value(x1)) < 1e-12);
  CHECK(std::abs(fs.values[1] - pw.value(x2)) < 1e-12);
}

TEST_CASE("impedance system")
{
  const double k = 1.1, a = 0.01, kappa = 0.5;
  const IncidentField pw = IncidentField::plane_wave(Vec3(0, 0, 1), k);
  CloudOptions o = options(BoundaryCondition::impedance, a);
  o.kappa = kappa;
  const Vec3 x1(0, 0, 0), x2(0.1, -0.2, 0.05);

  o.impedance = 0.0;
  const EffectiveFieldSolution zero = solve_las_impedance(make_cloud({x1, x2}, o), k, pw);
  CHECK(zero.values[0] == pw.value(x1));
  CHECK(zero.values[1] == pw.value(x2));

  const complex h(0.7, -0.3);
  o.impedance = h;
  CHECK(solve_las_impedance(make_cloud({x1}, o), k, pw).values[0] == pw.value(x1));

  // Balls: b_m = 4 pi and the coupling entries are -a^(2-kappa) 4 pi h g.
  const ParticleCloud two = make_cloud({x1, x2}, o);
  CHECK(two.area_factor[0] == doctest::Approx(4 * pi).epsilon(1e-12));
  const EffectiveFieldSolution sol = solve_las_impedance(two, k, pw);
  const complex c = -std::pow(a, 2 - kappa) * 4 * pi * h * kernel_g(x1, x2, k);
  const auto [u1, u2] = two_by_two(pw.value(x1), pw.value(x2), c);
  CHECK(std::abs(sol.values[0] - u1) < 1e-14);
  CHECK(std::abs(sol.values[1] - u2) < 1e-14);
  CHECK(std::abs(sol.mu[0] + std::pow(a, 2 - kappa) * 4 * pi * h) < 1e-14);

  o.impedance = complex(1, 0.2);
  CHECK_THROWS_AS(make_cloud({x1}, o), ValidationError);
}

TEST_CASE("neumann system")
{
  const double k = 0.7;
  const IncidentField pw = IncidentField::plane_wave(Vec3(1, 0, 0), k);
  CloudOptions o = options(BoundaryCondition::neumann, 0.01);
  const Vec3 x1(0.2, 0.1, 0);
  const EffectiveFieldSolution one = solve_las_neumann(make_cloud({x1}, o), k, pw);
  CHECK(one.values[0] == pw.value(x1));
  CHECK((one.gradients[0] - pw.gradient(x1)).norm() == 0.0);

  // Volumes -> 0.
  const std::vector<Vec3> centers{x1, Vec3(-0.3, 0.2, 0.1), Vec3(0, -0.4, 0.3)};
  o.a = 1e-7;
  const EffectiveFieldSolution tiny = solve_las_neumann(make_cloud(centers, o), k, pw);
  for (std::size_t m = 0; m < centers.size(); ++m)
    CHECK(std::abs(tiny.values[m] - pw.value(centers[m])) < 1e-15);

  // The Laplacian-unknown variant agrees with the eliminated one.
  o.a = 0.02;
  const ParticleCloud cl = make_cloud(centers, o);
  LasOptions five;
  five.keep_laplacian = true;
  const EffectiveFieldSolution s4 = solve_las_neumann(cl, k, pw);
  const EffectiveFieldSolution s5 = solve_las_neumann(cl, k, pw, five);
  for (std::size_t m = 0; m < centers.size(); ++m)
    CHECK(std::abs(s4.values[m] - s5.values[m]) < 1e-3 * std::abs(s4.values[m] - pw.value(centers[m])) + 1e-12);
}

TEST_CASE("two hard spheres against the oracle")
{
  // Unit spheres 20 apart, ka = 0.05, probes 50 away. Total fields are compared.
  const double a = 1.0, k = 0.05;
  const Vec3 c1(-10, 0, 0), c2(10, 0, 0);
  const IncidentField pw = IncidentField::plane_wave(Vec3(1, 1, 0).normalized(), k);
  const BemSolution bem =
      solve_neumann_bem({make_sphere_mesh(a, 2, c1), make_sphere_mesh(a, 2, c2)}, k, pw);
  CloudOptions o = options(BoundaryCondition::neumann, a);
  o.box = Box{Vec3(-20, -20, -20), Vec3(20, 20, 20)};
  const ParticleCloud cl = make_cloud({c1, c2}, o);
  const EffectiveFieldSolution sol = solve_las_neumann(cl, k, pw);
  for (const Vec3 &p : {Vec3(0, 60, 0), Vec3(60, 0, 0), Vec3(0, 0, -60)})
    CHECK(rel(evaluate_field(cl, sol, p), evaluate_bem_field(bem, p)) < 0.10);
}

TEST_CASE("transmission system")
{
  const double k = 0.9;
  const IncidentField pw = IncidentField::plane_wave(Vec3(0, 1, 0), k);
  CloudOptions o = options(BoundaryCondition::transmission, 0.02);
  const std::vector<Vec3> centers{Vec3(0, 0, 0), Vec3(0.3, 0, 0), Vec3(0, 0.4, 0.2)};

  o.rho = 1.0;
  o.k_interior = k;
  const EffectiveFieldSolution clear = solve_las_transmission(make_cloud(centers, o), k, pw);
  for (std::size_t m = 0; m < centers.size(); ++m)
    CHECK(clear.values[m] == pw.value(centers[m]));

  o.rho = 0.5;
  o.k_interior = 1.3;
  const ParticleCloud single = make_cloud({Vec3(0.1, 0, 0)}, o);
  const EffectiveFieldSolution s1 = solve_las_transmission(single, k, pw);
  CHECK(s1.values[0] == pw.value(single.centers[0]));

  // One particle versus the one-body formula with the same sphere data.
  ShapeFunctionals f;
  f.lambda = transmission_lambda(0.5);
  f.volume = single.volume[0];
  f.polarizability = ParticleShape::sphere().polarizability(f.lambda);
  const OneBodyResult ob = one_body_transmission(f, 0.5, k, 1.3, pw, single.centers[0], o.a);
  for (const Vec3 &p : {Vec3(3, 4, 1), Vec3(-2, 0.5, 7)})
    CHECK(std::abs(evaluate_field(single, s1, p) - scattered_field_one_body(ob, p)) < 1e-10);
}

TEST_CASE("field evaluation")
{
  const double k = 1.0;
  const IncidentField pw = IncidentField::plane_wave(Vec3(0, 0, 1), k);
  CloudOptions o = options(BoundaryCondition::dirichlet, 0.01);
  const ParticleCloud empty = make_cloud({}, o);
  const EffectiveFieldSolution none = solve_las_dirichlet(empty, k, pw);
  CHECK(evaluate_field(empty, none, Vec3(1, 2, 3)) == pw.value(Vec3(1, 2, 3)));

  // Radiation behaviour: (u - u0) |x| e^{-ik|x|} settles to the forward amplitude.
  o.box = Box{Vec3::Zero(), Vec3::Ones()};
  o.a = 0.005;
  const ParticleCloud cl = generate_cloud(o);
  const EffectiveFieldSolution sol = solve_las_dirichlet(cl, k, pw);
  const Vec3 fwd(0, 0, 1);
  auto far = [&](double d) {
    const Vec3 x = Vec3(0.5, 0.5, 0.5) + d * fwd;
    const double r = x.norm();
    return (evaluate_field(cl, sol, x) - pw.value(x)) * r * std::exp(-I * k * r);
  };
  const complex f3 = far(1e3), f4 = far(1e4);
  CHECK(rel(f3, f4) < 0.01);
  CHECK(rel(f4, cloud_amplitude(cl, sol, fwd)) < 0.01);
}

TEST_CASE("amplitude reciprocity")
{
  const double k = 1.2;
  CloudOptions o = options(BoundaryCondition::dirichlet, 0.004);
  o.box = Box{Vec3::Zero(), Vec3::Ones()};
  o.density = ScalarField::from_string("1 + x*y");
  const Vec3 alpha = Vec3(0, 0, 1), beta = Vec3(0.48, 0.6, 0.64);
  for (BoundaryCondition bc : {BoundaryCondition::dirichlet, BoundaryCondition::impedance})
  {
    o.bc = bc;
    o.impedance = complex(0.5, -0.5);
    const ParticleCloud cl = generate_cloud(o);
    const complex ab = cloud_amplitude(cl, solve_las(cl, k, IncidentField::plane_wave(alpha, k)), beta);
    const complex ba = cloud_amplitude(cl, solve_las(cl, k, IncidentField::plane_wave(-beta, k)), -alpha);
    CHECK(std::abs(ab - ba) <= 1e-8 * std::abs(ab));
  }
}

TEST_CASE("determinism of solutions")
{
  CloudOptions o = options(BoundaryCondition::dirichlet, 0.005);
  o.box = Box{Vec3::Zero(), Vec3::Ones()};
  o.seed = 4;
  const std::vector<Vec3> centers = generate_cloud(o).centers;
  o.bc = BoundaryCondition::transmission;
  o.rho = 0.6;
  o.k_interior = 1.5;
  const IncidentField pw = IncidentField::plane_wave(Vec3(1, 0, 0), 1.0);
  const ParticleCloud a = make_cloud(centers, o), b = make_cloud(centers, o);
  const EffectiveFieldSolution sa = solve_las(a, 1.0, pw), sb = solve_las(b, 1.0, pw);
  REQUIRE(sa.values.size() == sb.values.size());
  CHECK(std::memcmp(sa.values.data(), sb.values.data(), sa.values.size() * sizeof(complex)) == 0);
  CHECK(std::memcmp(sa.gradients.data(), sb.gradients.data(), sa.gradients.size() * sizeof(CVec3)) == 0);
}

TEST_CASE("dense and iterative solves agree")
{
  CloudOptions o;
  o.box = Box{Vec3::Zero(), Vec3::Ones()};
  o.a = 0.003;
  const ParticleCloud cl = generate_cloud(o);
  const IncidentField pw = IncidentField::plane_wave(Vec3(0, 1, 0), 1.0);
  const EffectiveFieldSolution dense = solve_las(cl, 1.0, pw);
  LasOptions it;
  it.dense_limit = 10;
  const EffectiveFieldSolution krylov = solve_las(cl, 1.0, pw, it);
  CHECK(dense.dense);
  CHECK_FALSE(krylov.dense);
  CHECK(krylov.iterations > 0);
  double worst = 0.0;
  for (std::size_t m = 0; m < cl.size(); ++m)
    worst = std::max(worst, std::abs(dense.values[m] - krylov.values[m]));
  CHECK(worst < 1e-8);
}

TEST_CASE("kernel replacement")
{
  CloudOptions o;
  o.box = Box{Vec3::Zero(), Vec3::Ones()};
  o.a = 0.01;
  const ParticleCloud cl = generate_cloud(o);
  const double k = 0.8;
  const IncidentField pw = IncidentField::plane_wave(Vec3(0, 1, 0), k);
  LasOptions free_space;
  free_space.kernel = [k](const Vec3 &x, const Vec3 &y) { return kernel_g(x, y, k); };
  const EffectiveFieldSolution a = solve_las(cl, k, pw), b = solve_las(cl, k, pw, free_space);
  for (std::size_t m = 0; m < cl.size(); ++m)
    CHECK(std::abs(a.values[m] - b.values[m]) < 1e-13);

  CloudOptions on = o;
  on.bc = BoundaryCondition::neumann;
  try
  {
    solve_las(make_cloud(cl.centers, on), k, pw, free_space);
    FAIL("expected unsupported_option");
  }
  catch (const ValidationError &e)
  {
    CHECK(e.code() == "unsupported_option");
  }
}

TEST_CASE("separation scaling trend")
{
  // Lattice spacing d = a^gamma in a box of edge L; field deviation at the center.
  const double k = 1.0;
  const IncidentField pw = IncidentField::plane_wave(Vec3(0, 0, 1), k);
  auto center_field = [&](double a, double gamma, double edge) {
    const double d = std::pow(a, gamma);
    const int n = std::max(1, static_cast<int>(std::floor(edge / d)));
    std::vector<Vec3> centers;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l)
          centers.push_back(Vec3(i + 0.5, j + 0.5, l + 0.5) * (edge / n));
    CloudOptions o;
    o.box = Box{Vec3::Zero(), Vec3::Constant(edge)};
    o.a = a;
    const ParticleCloud cl = make_cloud(centers, o);
    const Vec3 mid = Vec3::Constant(edge / 2) + Vec3(0.3, 0.2, 0.1) * (edge / n);
    return std::abs(evaluate_field(cl, solve_las(cl, k, pw), mid));
  };
  // gamma > 1/3: the medium becomes opaque, u -> 0 inside.
  double prev = 1e9;
  for (double a : {0.01, 0.0025, 0.001})
  {
    const double u = center_field(a, 0.5, 0.3);
    CHECK(u < prev);
    prev = u;
  }
  // gamma < 1/3: the particles fade out, u -> u0 = 1 in modulus.
  prev = 1e9;
  for (double a : {0.01, 0.001, 0.0001})
  {
    const double dev = std::abs(center_field(a, 0.25, 1.0) - 1.0);
    CHECK(dev < prev);
    prev = dev;
  }
}
