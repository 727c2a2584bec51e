// Copyright The smallscat Authors.
// SPDX-License-Identifier: Apache-2.0

// Acceptance run: one line per criterion with the measured quantities, the tolerance and the
// runtime against its budget. Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "smallscat/bem_oracle.hpp"
#include "smallscat/effective_medium.hpp"
#include "smallscat/geometry.hpp"
#include "smallscat/many_body.hpp"
#include "smallscat/one_body.hpp"
#include "smallscat/potential_ops.hpp"
#include "smallscat/shape_functionals.hpp"

using namespace smallscat;

namespace
{

struct Verdict
{
  bool pass = true;
  std::ostringstream detail;

  // Records a named check; the verdict fails when any check fails.
  void check(bool ok, const std::string &what)
  {
    pass = pass && ok;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [FAIL]");
  }
};

std::string fmt(const char *f, double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double rel(complex a, complex b) { return std::abs(a - b) / std::abs(b); }

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double> &x, const std::vector<double> &y)
{
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Vec3 polar_direction(double theta_deg)
{
  const double t = theta_deg * pi / 180.0;
  return Vec3(std::sin(t), 0.0, std::cos(t));
}

void sphere_capacitance(Verdict &v)
{
  const SurfaceMesh s = make_sphere_mesh(1.0, 3);
  const double c0 = capacitance_zeroth(s), c1 = capacitance_bem(s);
  const double e0 = std::abs(c0 / (4 * pi) - 1), e1 = std::abs(c1 / (4 * pi) - 1);
  v.check(e0 <= 0.01, "zeroth rel err " + fmt("%.2e", e0) + " <= 1e-2");
  v.check(e1 <= 0.01, "bem rel err " + fmt("%.2e", e1) + " <= 1e-2");
}

void sphere_polarizability(Verdict &v)
{
  const SurfaceMesh s = make_sphere_mesh(1.0, 3);
  const Mat3 b = polarizability_tensor(s, 1.0);
  const double e = (b + 1.5 * Mat3::Identity()).norm() / (1.5 * Mat3::Identity()).norm();
  v.check(e <= 0.02, "tensor rel err " + fmt("%.2e", e) + " <= 2e-2");

  const double k = 0.05;
  const IncidentField pw = IncidentField::plane_wave(Vec3(0, 0, 1), k);
  const BemSolution bem = solve_neumann_bem({s}, k, pw);
  const OneBodyResult ob = one_body_neumann(mesh_volume(s), b, k, pw, Vec3::Zero(), 1.0);
  double worst = 0.0;
  for (double theta : {0.0, 90.0, 180.0})
  {
    const Vec3 beta = polar_direction(theta);
    worst = std::max(worst, rel(ob.amplitude(beta), far_field(bem, beta)));
  }
  v.check(worst <= 0.05, "far field vs oracle at 0/90/180 deg " + fmt("%.2e", worst) + " <= 5e-2");
}

void smallness_slopes(Verdict &v)
{
  const double k = 1.0, kappa = 0.5;
  const complex h(1.0, -0.5);
  const std::vector<double> radii{0.05, 0.1, 0.2};
  const IncidentField pw = IncidentField::plane_wave(Vec3(0, 0, 1), k);
  const Vec3 beta = polar_direction(60.0);
  std::vector<double> ad, ai, an;
  for (double a : radii)
  {
    const SurfaceMesh s = make_sphere_mesh(a, 2);
    ad.push_back(std::abs(far_field(solve_dirichlet_bem({s}, k, pw), beta)));
    ai.push_back(std::abs(far_field(solve_impedance_bem({s}, k, h * std::pow(a, -kappa), pw), beta)));
    an.push_back(std::abs(far_field(solve_neumann_bem({s}, k, pw), beta)));
  }
  const double sd = loglog_slope(radii, ad), si = loglog_slope(radii, ai),
               sn = loglog_slope(radii, an);
  v.check(std::abs(sd - 1.0) <= 0.2, "dirichlet slope " + fmt("%.3f", sd) + " in 1.0+-0.2");
  v.check(std::abs(si - (2 - kappa)) <= 0.2,
          "impedance slope " + fmt("%.3f", si) + " in 1.5+-0.2");
  v.check(std::abs(sn - 3.0) <= 0.2, "neumann slope " + fmt("%.3f", sn) + " in 3.0+-0.2");
}

void transmission_one_body(Verdict &v)
{
  const double k = 0.05, k1 = 1.2 * k, rho = 0.5;
  const SurfaceMesh s = make_sphere_mesh(1.0, 3);
  const VolumeGrid g = make_volume_grid(s, 12);
  const IncidentField pw = IncidentField::plane_wave(Vec3(0, 0, 1), k);
  const BemSolution bem = solve_transmission_bem(s, g, k, k1, rho, pw);
  const ShapeFunctionals f = compute_shape_functionals(s, transmission_lambda(rho));
  const OneBodyResult ob = one_body_transmission(f, rho, k, k1, pw, Vec3::Zero(), 1.0);
  const double eq = rel(bem.total_charge(0), ob.charge);
  v.check(eq <= 0.10, "Q rel err " + fmt("%.2e", eq) + " <= 1e-1");

  // Interior value at the cell nearest the center.
  std::size_t best = 0;
  for (std::size_t i = 1; i < g.size(); ++i)
    if (g.cells[i].norm() < g.cells[best].norm())
      best = i;
  const complex u1 = bem.interior_values[static_cast<Eigen::Index>(best)];
  const double eu = rel(u1, pw.value(g.cells[best]));
  v.check(eu <= 0.05, "u1 vs u0(x1) " + fmt("%.2e", eu) + " <= 5e-2");
}

void two_body(Verdict &v)
{
  const double a = 1.0, k = 0.1;
  const Vec3 c1(-10, 0, 0), c2(10, 0, 0);
  const IncidentField pw = IncidentField::plane_wave(Vec3(1, 1, 0).normalized(), k);
  const BemSolution bem =
      solve_dirichlet_bem({make_sphere_mesh(a, 3, c1), make_sphere_mesh(a, 3, c2)}, k, pw);
  CloudOptions o;
  o.box = Box{Vec3(-20, -20, -20), Vec3(20, 20, 20)};
  o.a = a;
  const ParticleCloud cl = make_cloud({c1, c2}, o);
  const EffectiveFieldSolution sol = solve_las_dirichlet(cl, k, pw);
  double worst = 0.0;
  for (const Vec3 &p : {Vec3(0, 60, 0), Vec3(60, 0, 0), Vec3(0, 0, -60), Vec3(-45, -45, 0)})
    worst = std::max(worst, rel(evaluate_field(cl, sol, p), evaluate_bem_field(bem, p)));
  v.check(worst <= 0.10, "max rel err over 4 probes " + fmt("%.2e", worst) + " <= 1e-1");
}

void continuum_limit(Verdict &v)
{
  const double k = 1.0;
  const Box box{Vec3::Zero(), Vec3::Ones()};
  const IncidentField pw = IncidentField::plane_wave(Vec3(0, 0, 1), k);
  std::vector<Vec3> ring;
  for (int i = 0; i < 8; ++i)
  {
    const double t = 2 * pi * i / 8;
    ring.push_back(Vec3(0.5 + 2 * std::cos(t), 0.5 + 2 * std::sin(t), 0.5));
  }
  MediumSpec spec;
  spec.box = box;
  spec.number_density = 1.0;
  CollocationOptions co;
  co.cells = {16, 16, 16};
  const std::vector<complex> uc = solve_limit_dirichlet(spec, k, pw, co).evaluate(ring);
  double scale = 0.0;
  for (const complex &u : uc)
    scale = std::max(scale, std::abs(u));

  std::vector<double> gaps;
  std::string trail;
  for (int m : {125, 512, 1000})
  {
    CloudOptions o;
    o.box = box;
    o.a = 1.0 / m;
    o.seed = 7;
    const ParticleCloud cl = generate_cloud(o);
    const std::vector<complex> u = evaluate_field(cl, solve_las_dirichlet(cl, k, pw), ring);
    double gap = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
      gap = std::max(gap, std::abs(u[i] - uc[i]));
    gaps.push_back(gap / scale);
    trail += (trail.empty() ? "" : ", ") + std::string("M=") + std::to_string(cl.size()) + " " +
             fmt("%.2e", gaps.back());
  }
  v.check(gaps[1] < gaps[0] && gaps[2] < gaps[1], "gaps " + trail + " decreasing");
  v.check(gaps[2] <= 0.05, "gap at M=1000 " + fmt("%.2e", gaps[2]) + " <= 5e-2");
}

void material_design(Verdict &v)
{
  const double k = 1.0, b = 4 * pi;
  const complex target(1.2, 0.1);
  const MaterialDesign d = design_material(ScalarField(target), k, b);
  const complex n = d.number_density.constant_value(), h = d.impedance.constant_value();
  const complex q = b * n * h;
  const double rt = std::abs(refraction_coefficient(q, k) - target);
  v.check(rt <= 1e-12, "round trip " + fmt("%.1e", rt) + " <= 1e-12");
  v.check(h.imag() < 0.0, "N " + fmt("%.5f", n.real()) + ", Im h < 0");

  MediumSpec spec;
  spec.box = Box{Vec3::Zero(), Vec3::Ones()};
  spec.number_density = d.number_density;
  spec.impedance = d.impedance;
  CollocationOptions co;
  co.cells = {12, 12, 12};
  const CollocationSolution s =
      solve_limit_impedance(spec, k, b, IncidentField::plane_wave(Vec3(0, 0, 1), k), co);
  const PdeResidual r = pde_residual(s, ScalarField(q));
  v.check(r.relative <= 0.05, "interior FD residual " + fmt("%.2e", r.relative) + " <= 5e-2");
}

void property_suites(Verdict &v)
{
  // Geometry invariants.
  const SurfaceMesh e = make_ellipsoid_mesh(Vec3(1, 0.7, 0.4), 3);
  const Mat3 rot = rotation_matrix(Vec3(1, 2, 3), 0.7);
  const SurfaceMesh er = e.transformed(rot, Vec3(5, -1, 2));
  const SurfaceMesh es = e.scaled(2.5);
  const double geo = std::max({std::abs(er.area() / e.area() - 1), std::abs(er.volume() / e.volume() - 1),
                               std::abs(es.area() / (6.25 * e.area()) - 1),
                               std::abs(es.volume() / (15.625 * e.volume()) - 1),
                               std::abs(capacitance_bem(er) / capacitance_bem(e) - 1),
                               std::abs(capacitance_bem(es) / (2.5 * capacitance_bem(e)) - 1)});
  v.check(geo <= 1e-10, "rotation/scaling " + fmt("%.1e", geo) + " <= 1e-10");

  // Column identity of A0: off-diagonal quadrature plus the curved self-panel part.
  const SurfaceMesh s = make_sphere_mesh(1.0, 3);
  const BoundaryOperatorMatrix flat = assemble_A(s, 0.0, A0Diagonal::flat_panel);
  double worst = 0.0;
  const auto n = static_cast<Eigen::Index>(s.panel_count());
  for (Eigen::Index t = 0; t < n; ++t)
  {
    complex c = -disc_self_integral(s.panel_area(t), 0.0);
    for (Eigen::Index q = 0; q < n; ++q)
      c += s.panel_area(q) / s.panel_area(t) * flat.entries(q, t);
    worst = std::max(worst, std::abs(c + 1.0));
  }
  v.check(worst <= 0.02, "A0 identity " + fmt("%.2e", worst) + " <= 2e-2");

  // Polarizability equivariance and the lambda = 0 tensor.
  const SurfaceMesh m = make_ellipsoid_mesh(Vec3(1, 0.7, 0.4), 2);
  const Mat3 b = polarizability_tensor(m, 0.8);
  const Mat3 br = polarizability_tensor(m.transformed(rot, Vec3(0.5, 0.2, -3)), 0.8);
  const double eq = (br - rot * b * rot.transpose()).norm();
  v.check(eq <= 1e-8, "equivariance " + fmt("%.1e", eq) + " <= 1e-8");
  v.check(polarizability_tensor(m, 0.0).norm() == 0.0, "lambda=0 tensor exactly zero");

  // Exact reductions.
  const double k = 1.0;
  const IncidentField pw = IncidentField::plane_wave(Vec3(0.6, 0, 0.8), k);
  bool trivial = true;
  CloudOptions co;
  co.box = Box{Vec3::Zero(), Vec3::Ones()};
  co.a = 0.004;
  co.density = 0.0;
  trivial = trivial && generate_cloud(co).size() == 0;
  const ParticleCloud one = make_cloud({Vec3(0.2, 0.3, 0.4)}, co);
  trivial = trivial && solve_las(one, k, pw).values[0] == pw.value(one.centers[0]);
  MediumSpec spec;
  spec.box = co.box;
  CollocationOptions small;
  small.cells = {4, 4, 4};
  for (const auto &sol : {solve_limit_dirichlet(spec, k, pw, small),
                          solve_limit_impedance(spec, k, 4 * pi, pw, small),
                          solve_limit_neumann(spec, k, pw, small)})
    for (std::size_t p = 0; p < sol.grid.size(); ++p)
      trivial = trivial && sol.values[p] == pw.value(sol.grid.nodes[p]);
  trivial = trivial && refraction_coefficient(complex(0.0), k) == complex(1.0);
  const auto [n0, h0] = design_point(1.0, k, 4 * pi);
  trivial = trivial && n0 == 0.0 && h0 == complex(0.0);
  const BackgroundGreen g(spec, k, small);
  trivial = trivial && g(Vec3(2, 0, 0), Vec3(0.5, 0.5, 0.5)) ==
                           kernel_g(Vec3(2, 0, 0), Vec3(0.5, 0.5, 0.5), k);
  v.check(trivial, "exact reductions hold");

  // Seed-stable bytes.
  co.density = ScalarField::from_string("1 + x");
  const ParticleCloud c1 = generate_cloud(co), c2 = generate_cloud(co);
  const EffectiveFieldSolution s1 = solve_las(c1, k, pw), s2 = solve_las(c2, k, pw);
  const bool same = c1.size() == c2.size() &&
                    std::memcmp(c1.centers.data(), c2.centers.data(), c1.size() * sizeof(Vec3)) == 0 &&
                    std::memcmp(s1.values.data(), s2.values.data(), s1.values.size() * sizeof(complex)) == 0;
  v.check(same, "seed-stable bytes for M=" + std::to_string(c1.size()));
}

void background_green(Verdict &v)
{
  const double k = 1.0;
  const Vec3 y(0.3, 0.4, 0.5), x(2, 0.5, 0.5);
  MediumSpec spec;
  spec.box = Box{Vec3::Zero(), Vec3::Ones()};
  CollocationOptions co;
  co.cells = {8, 8, 8};
  const BackgroundGreen flat(spec, k, co);
  bool exact = true;
  for (const Vec3 &p : {x, Vec3(0.5, 0.5, 0.5), Vec3(0.31, 0.4, 0.5)})
    exact = exact && flat(p, y) == kernel_g(p, y, k);
  v.check(exact, "zero contrast G == g");

  std::vector<double> rem;
  for (double eps : {0.05, 0.025})
  {
    spec.background_index_sq = 1.0 + eps;
    const BackgroundGreen g(spec, k, co);
    rem.push_back(std::abs(g(x, y) - kernel_g(x, y, k) - g.born_term(x, y)));
  }
  const double order = std::log2(rem[0] / rem[1]);
  v.check(std::abs(order - 2.0) <= 0.2, "Born remainder at eps=0.05 " + fmt("%.2e", rem[0]) +
                                            ", falloff order " + fmt("%.2f", order) + " in 2+-0.2");
}

struct Criterion
{
  int id;
  const char *name;
  double budget_seconds;
  std::function<void(Verdict &)> run;
};

}  // namespace

int main()
{
  const std::vector<Criterion> criteria = {
      {1, "sphere capacitance", 10, sphere_capacitance},
      {2, "sphere polarizability", 60, sphere_polarizability},
      {3, "order-of-smallness slopes", 300, smallness_slopes},
      {4, "transmission one-body", 300, transmission_one_body},
      {5, "two-body validation", 300, two_body},
      {6, "many-body to continuum", 600, continuum_limit},
      {7, "material design round trip", 300, material_design},
      {8, "property suites", 300, property_suites},
      {9, "background Green function", 300, background_green},
  };
  int failed = 0;
  for (const Criterion &c : criteria)
  {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try
    {
      c.run(v);
    }
    catch (const std::exception &e)
    {
      v.check(false, std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    v.check(seconds <= c.budget_seconds,
            "runtime " + fmt("%.1f", seconds) + " s <= " + fmt("%.0f", c.budget_seconds) + " s");
    std::printf("criterion %d %s: %s | %s\n", c.id, v.pass ? "PASS" : "FAIL", c.name,
                v.detail.str().c_str());
    std::fflush(stdout);
    failed += v.pass ? 0 : 1;
  }
  return failed;
}
