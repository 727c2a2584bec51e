// Copyright The smallscat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "smallscat/effective_medium.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "smallscat/potential_ops.hpp"
#include "smallscat/shape_functionals.hpp"

namespace smallscat
{

CollocationGrid make_collocation_grid(const Box &box, const std::array<int, 3> &cells)
{
  for (int n : cells)
  {
    if (n < 1 || n > 256)
    {
      throw ValidationError("invalid_argument", "collocation cells per axis must lie in [1, 256]");
    }
  }
  if (!((box.hi.array() > box.lo.array()).all()))
  {
    throw ValidationError("invalid_argument", "box must have positive extent");
  }
  CollocationGrid g;
  g.box = box;
  g.cells = cells;
  const Vec3 ext = box.extent();
  g.spacing = Vec3(ext.x() / cells[0], ext.y() / cells[1], ext.z() / cells[2]);
  g.cell_volume = g.spacing.prod();
  g.nodes.reserve(static_cast<std::size_t>(cells[0]) * cells[1] * cells[2]);
  for (int k = 0; k < cells[2]; ++k)
    for (int j = 0; j < cells[1]; ++j)
      for (int i = 0; i < cells[0]; ++i)
        g.nodes.push_back(box.lo + ((Vec3(i, j, k).array() + 0.5) * g.spacing.array()).matrix());
  return g;
}

namespace
{

double ball_radius(double volume) { return std::cbrt(3.0 * volume / (4.0 * pi)); }

// vol * g(x,y) (x-y)/|x-y|, regularized inside the equal-volume ball of the cell.
CVec3 dipole_kernel(const Vec3 &x, const Vec3 &y, double volume, double k)
{
  const Vec3 d = x - y;
  const double r = d.norm();
  if (r == 0.0)
  {
    return CVec3::Zero();
  }
  const double radius = ball_radius(volume);
  if (r < radius)
  {
    const complex g = std::exp(I * (k * radius)) / (4.0 * pi * radius);
    return (volume * g / radius) * d.cast<complex>();
  }
  return (volume * kernel_g(x, y, k) / r) * d.cast<complex>();
}

// vol * d/dx_i [g (x-y)_p/|x-y|], row i, column p.
CMat3 dipole_kernel_gradient(const Vec3 &x, const Vec3 &y, double volume, double k)
{
  const Vec3 d = x - y;
  const double r = d.norm();
  const Vec3 e = d / r;
  const complex g = kernel_g(x, y, k);
  const complex radial = g * (I * k - 1.0 / r);
  CMat3 m;
  for (int i = 0; i < 3; ++i)
    for (int p = 0; p < 3; ++p)
      m(i, p) = volume * (radial * e[i] * e[p] + g * ((i == p ? 1.0 : 0.0) - e[i] * e[p]) / r);
  return m;
}

// Kernel values for every lattice offset of a uniform grid.
struct OffsetTables
{
  std::array<int, 3> span{};
  std::vector<complex> w;
  std::vector<CVec3> dw, e;
  std::vector<CMat3> de;

  std::size_t index(int di, int dj, int dk) const
  {
    return static_cast<std::size_t>(di + span[0] - 1) +
           static_cast<std::size_t>(2 * span[0] - 1) *
               (static_cast<std::size_t>(dj + span[1] - 1) +
                static_cast<std::size_t>(2 * span[1] - 1) * (dk + span[2] - 1));
  }
};

OffsetTables offset_tables(const CollocationGrid &grid, double k, SelfCell self, bool vector)
{
  OffsetTables t;
  t.span = grid.cells;
  const std::size_t n = static_cast<std::size_t>(2 * t.span[0] - 1) * (2 * t.span[1] - 1) *
                        (2 * t.span[2] - 1);
  t.w.resize(n);
  if (vector)
  {
    t.dw.resize(n);
    t.e.resize(n);
    t.de.resize(n);
  }
  const double vol = grid.cell_volume;
  const double radius = ball_radius(vol);
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(static)
  for (long idx = 0; idx < count; ++idx)
  {
    long rest = idx;
    const int di = static_cast<int>(rest % (2 * t.span[0] - 1)) - (t.span[0] - 1);
    rest /= (2 * t.span[0] - 1);
    const int dj = static_cast<int>(rest % (2 * t.span[1] - 1)) - (t.span[1] - 1);
    const int dk = static_cast<int>(rest / (2 * t.span[1] - 1)) - (t.span[2] - 1);
    const Vec3 d(di * grid.spacing.x(), dj * grid.spacing.y(), dk * grid.spacing.z());
    const Vec3 zero = Vec3::Zero();
    const bool centre = di == 0 && dj == 0 && dk == 0;
    if (centre)
    {
      t.w[idx] = self == SelfCell::ball ? cell_potential(zero, zero, vol, k) : complex(0.0);
      if (vector)
      {
        t.dw[idx] = CVec3::Zero();
        t.e[idx] = CVec3::Zero();
        // Ball average of d/dx_i (g e_p) is delta_ip R e^{ikR} / 3.
        t.de[idx] = self == SelfCell::ball
                        ? CMat3(CMat3::Identity() * (radius * std::exp(I * (k * radius)) / 3.0))
                        : CMat3(CMat3::Zero());
      }
      continue;
    }
    t.w[idx] = cell_potential(d, zero, vol, k);
    if (vector)
    {
      t.dw[idx] = cell_potential_gradient(d, zero, vol, k);
      t.e[idx] = dipole_kernel(d, zero, vol, k);
      t.de[idx] = dipole_kernel_gradient(d, zero, vol, k);
    }
  }
  return t;
}

struct Coefficients
{
  std::vector<complex> alpha;
  std::vector<CMat3> tensor;
  bool vector = false;
};

void check_real_nonnegative(const complex &v, const Vec3 &x, const char *name)
{
  if (v.imag() != 0.0 || !(v.real() >= 0.0))
  {
    std::ostringstream os;
    os << name << " must be real and non-negative, got (" << v.real() << ", " << v.imag()
       << ") at (" << x.x() << ", " << x.y() << ", " << x.z() << ")";
    throw ValidationError("constraint_violation", os.str());
  }
}

CollocationSolution solve_generic(BoundaryCondition bc, const CollocationGrid &grid, double k,
                                  const Coefficients &c, const IncidentField &incident,
                                  const CollocationOptions &options)
{
  if (!(k >= 0.0))
  {
    throw ValidationError("invalid_argument", "wavenumber must be non-negative");
  }
  CollocationSolution out;
  out.bc = bc;
  out.k = k;
  out.grid = grid;
  out.self_cell = options.self_cell;
  out.alpha = c.alpha;
  out.tensor = c.tensor;
  out.incident = incident;

  const OffsetTables t = offset_tables(grid, k, options.self_cell, c.vector);
  const int nx = grid.cells[0], ny = grid.cells[1], nz = grid.cells[2];
  const auto p_count = static_cast<Eigen::Index>(grid.size());
  const int per = c.vector ? 4 : 1;
  const Eigen::Index dim = per * p_count;

  auto coords = [&](Eigen::Index p) {
    return std::array<int, 3>{static_cast<int>(p % nx), static_cast<int>((p / nx) % ny),
                              static_cast<int>(p / (nx * ny))};
  };
  // Block of the operator coupling node q's unknowns into node p's equations.
  auto block = [&](Eigen::Index p, Eigen::Index q, Eigen::Matrix4cd &b) {
    const auto a = coords(p), s = coords(q);
    const std::size_t o = t.index(a[0] - s[0], a[1] - s[1], a[2] - s[2]);
    b(0, 0) = t.w[o] * c.alpha[q];
    if (!c.vector)
      return;
    b.block<1, 3>(0, 1) = t.e[o].transpose() * c.tensor[q];
    b.block<3, 1>(1, 0) = t.dw[o] * c.alpha[q];
    b.block<3, 3>(1, 1) = t.de[o] * c.tensor[q];
  };

  CVector rhs(dim);
  for (Eigen::Index p = 0; p < p_count; ++p)
  {
    if (c.vector)
    {
      const LocalField f = incident.local(grid.nodes[p]);
      rhs[per * p] = f.value;
      rhs.segment<3>(per * p + 1) = f.gradient;
    }
    else
    {
      rhs[p] = incident.value(grid.nodes[p]);
    }
  }

  CVector x;
  (void)nz;
  if (static_cast<std::size_t>(dim) <= options.dense_limit)
  {
    CMatrix a = CMatrix::Identity(dim, dim);
#pragma omp parallel for schedule(static)
    for (Eigen::Index p = 0; p < p_count; ++p)
    {
      Eigen::Matrix4cd b;
      for (Eigen::Index q = 0; q < p_count; ++q)
      {
        block(p, q, b);
        a.block(per * p, per * q, per, per) -= b.topLeftCorner(per, per);
      }
    }
    DenseSolver solver(a, options.min_rcond);
    x = solver.solve(rhs);
    const double bn = rhs.norm();
    out.residual = bn > 0.0 ? (a * x - rhs).norm() / bn : 0.0;
    out.dense = true;
  }
  else
  {
    LinearOperator apply = [&](const CVector &v, CVector &y) {
      y = v;
#pragma omp parallel for schedule(static)
      for (Eigen::Index p = 0; p < p_count; ++p)
      {
        Eigen::Matrix4cd b;
        Eigen::Vector4cd acc = Eigen::Vector4cd::Zero();
        for (Eigen::Index q = 0; q < p_count; ++q)
        {
          block(p, q, b);
          acc.head(per) += b.topLeftCorner(per, per) * v.segment(per * q, per);
        }
        y.segment(per * p, per) -= acc.head(per);
      }
    };
    GmresResult r = gmres(apply, rhs, options.gmres);
    out.dense = false;
    out.residual = r.relative_residual;
    out.iterations = r.iterations;
    if (!r.converged)
    {
      std::ostringstream os;
      os << "GMRES stopped after " << r.iterations << " iterations at relative residual "
         << r.relative_residual;
      throw SolverError("not_converged", os.str());
    }
    x = r.solution;
  }
  out.values.resize(static_cast<std::size_t>(p_count));
  if (c.vector)
    out.gradients.resize(static_cast<std::size_t>(p_count));
  for (Eigen::Index p = 0; p < p_count; ++p)
  {
    out.values[p] = x[per * p];
    if (c.vector)
      out.gradients[p] = x.segment<3>(per * p + 1);
  }
  return out;
}

}  // namespace

complex CollocationSolution::evaluate(const Vec3 &x) const
{
  complex v = incident.value(x);
  const double vol = grid.cell_volume;
  const bool vec = !gradients.empty();
  for (std::size_t q = 0; q < grid.size(); ++q)
  {
    const Vec3 &y = grid.nodes[q];
    complex w;
    if ((x - y).norm() == 0.0 && self_cell == SelfCell::omit)
      w = 0.0;
    else
      w = cell_potential(x, y, vol, k);
    v += w * alpha[q] * values[q];
    if (vec)
    {
      v += (dipole_kernel(x, y, vol, k).array() * (tensor[q] * gradients[q]).array()).sum();
    }
  }
  return v;
}

std::vector<complex> CollocationSolution::evaluate(const std::vector<Vec3> &points) const
{
  std::vector<complex> out(points.size());
  const auto n = static_cast<long>(points.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < n; ++i)
  {
    out[i] = evaluate(points[i]);
  }
  return out;
}

CollocationSolution solve_limit_dirichlet(const MediumSpec &spec, double k,
                                          const IncidentField &incident,
                                          const CollocationOptions &options)
{
  const CollocationGrid grid = make_collocation_grid(spec.box, options.cells);
  Coefficients c;
  c.alpha.resize(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p)
  {
    const Vec3 &y = grid.nodes[p];
    const complex n = spec.number_density(y);
    check_real_nonnegative(n, y, "number density N");
    const complex cap = spec.capacitance_density(y);
    if (cap.imag() != 0.0 || !(cap.real() > 0.0))
    {
      throw ValidationError("constraint_violation", "capacitance density c must be positive");
    }
    c.alpha[p] = -cap * n;
  }
  return solve_generic(BoundaryCondition::dirichlet, grid, k, c, incident, options);
}

CollocationSolution solve_limit_impedance(const MediumSpec &spec, double k, double b,
                                          const IncidentField &incident,
                                          const CollocationOptions &options)
{
  if (!(b > 0.0))
  {
    throw ValidationError("constraint_violation", "area factor b must be positive");
  }
  const CollocationGrid grid = make_collocation_grid(spec.box, options.cells);
  Coefficients c;
  c.alpha.resize(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p)
  {
    const Vec3 &y = grid.nodes[p];
    const complex n = spec.number_density(y);
    check_real_nonnegative(n, y, "number density N");
    const complex h = spec.impedance(y);
    if (h.imag() > 0.0)
    {
      std::ostringstream os;
      os << "impedance must satisfy Im h <= 0, got Im h = " << h.imag() << " at ("
         << y.transpose() << ")";
      throw ValidationError("constraint_violation", os.str());
    }
    c.alpha[p] = -b * n * h;
  }
  return solve_generic(BoundaryCondition::impedance, grid, k, c, incident, options);
}

CollocationSolution solve_limit_neumann(const MediumSpec &spec, double k,
                                        const IncidentField &incident,
                                        const CollocationOptions &options)
{
  const CollocationGrid grid = make_collocation_grid(spec.box, options.cells);
  Coefficients c;
  c.vector = true;
  c.alpha.resize(grid.size());
  c.tensor.resize(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p)
  {
    const Vec3 &y = grid.nodes[p];
    const complex packing = spec.packing(y);
    check_real_nonnegative(packing, y, "packing fraction");
    // rho Lap u with Lap u = -k^2 u.
    c.alpha[p] = -k * k * packing;
    c.tensor[p] = I * k * spec.tensor(y);
  }
  return solve_generic(BoundaryCondition::neumann, grid, k, c, incident, options);
}

CollocationSolution solve_limit_transmission(const MediumSpec &spec, double k,
                                             const IncidentField &incident,
                                             const CollocationOptions &options)
{
  const CollocationGrid grid = make_collocation_grid(spec.box, options.cells);
  Coefficients c;
  c.vector = true;
  c.alpha.resize(grid.size());
  c.tensor.resize(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p)
  {
    const Vec3 &y = grid.nodes[p];
    const complex n = spec.number_density(y);
    check_real_nonnegative(n, y, "number density N");
    const complex rho = spec.rho(y);
    if (rho.imag() != 0.0 || !(rho.real() > 0.0))
    {
      throw ValidationError("constraint_violation", "density ratio rho must be real and positive");
    }
    const complex k2 = spec.k_interior_sq(y);
    // (1 - rho)(Lap - K^2 + k^2) u + (K^2 - k^2) u with Lap u = -k^2 u.
    c.alpha[p] = n * (rho.real() * k2 - k * k);
    const CMat3 beta = spec.shape
                           ? CMat3(spec.shape->polarizability(transmission_lambda(rho.real()))
                                       .cast<complex>())
                           : spec.tensor(y);
    c.tensor[p] = I * k * n * beta;
  }
  return solve_generic(BoundaryCondition::transmission, grid, k, c, incident, options);
}

PdeResidual pde_residual(const CollocationSolution &solution, const ScalarField &q)
{
  const auto &g = solution.grid;
  const int nx = g.cells[0], ny = g.cells[1], nz = g.cells[2];
  PdeResidual r;
  const double k2 = solution.k * solution.k;
  for (int k = 1; k + 1 < nz; ++k)
  {
    for (int j = 1; j + 1 < ny; ++j)
    {
      for (int i = 1; i + 1 < nx; ++i)
      {
        const std::size_t p = g.index(i, j, k);
        const complex u = solution.values[p];
        complex lap = 0.0;
        lap += (solution.values[g.index(i + 1, j, k)] + solution.values[g.index(i - 1, j, k)] -
                2.0 * u) /
               (g.spacing.x() * g.spacing.x());
        lap += (solution.values[g.index(i, j + 1, k)] + solution.values[g.index(i, j - 1, k)] -
                2.0 * u) /
               (g.spacing.y() * g.spacing.y());
        lap += (solution.values[g.index(i, j, k + 1)] + solution.values[g.index(i, j, k - 1)] -
                2.0 * u) /
               (g.spacing.z() * g.spacing.z());
        const complex res = lap + (k2 - q(g.nodes[p])) * u;
        r.max_residual = std::max(r.max_residual, std::abs(res));
        r.max_field = std::max(r.max_field, std::abs(u));
        ++r.nodes;
      }
    }
  }
  if (r.nodes == 0)
  {
    throw ValidationError("invalid_argument", "PDE residual needs at least 3 cells per axis");
  }
  const double scale = (k2 > 0.0 ? k2 : 1.0) * r.max_field;
  r.relative = scale > 0.0 ? r.max_residual / scale : 0.0;
  return r;
}

complex refraction_coefficient(complex q, double k)
{
  if (!(k > 0.0))
  {
    throw ValidationError("invalid_argument", "wavenumber must be positive");
  }
  return 1.0 - q / (k * k);
}

ScalarField refraction_coefficient(const ScalarField &q, double k)
{
  if (!(k > 0.0))
  {
    throw ValidationError("invalid_argument", "wavenumber must be positive");
  }
  if (q.is_constant())
  {
    return ScalarField(refraction_coefficient(q.constant_value(), k));
  }
  return ScalarField::from_function(
      [q, k](const Vec3 &x) { return refraction_coefficient(q(x), k); },
      "1 - (" + q.describe() + ")/k^2");
}

std::pair<double, complex> design_point(complex n2_target, double k, double b)
{
  if (!(k > 0.0))
  {
    throw ValidationError("invalid_argument", "wavenumber must be positive");
  }
  if (!(b > 0.0))
  {
    throw ValidationError("constraint_violation", "area factor b must be positive");
  }
  if (n2_target.imag() < 0.0)
  {
    std::ostringstream os;
    os << "target refraction coefficient must satisfy Im n^2 >= 0, got " << n2_target.imag();
    throw ValidationError("constraint_violation", os.str());
  }
  const complex q = k * k * (1.0 - n2_target);
  const double mag = std::abs(q);
  if (mag == 0.0)
  {
    return {0.0, 0.0};
  }
  return {mag / b, q / mag};
}

MaterialDesign design_material(const ScalarField &n2_target, double k, double b,
                               const std::vector<Vec3> &check_points)
{
  design_point(n2_target.is_constant() ? n2_target.constant_value() : complex(1.0), k, b);
  for (const auto &x : check_points)
  {
    design_point(n2_target(x), k, b);
  }
  MaterialDesign d;
  if (n2_target.is_constant())
  {
    const auto [n, h] = design_point(n2_target.constant_value(), k, b);
    d.number_density = ScalarField(n);
    d.impedance = ScalarField(h);
    return d;
  }
  d.number_density = ScalarField::from_function(
      [n2_target, k, b](const Vec3 &x) { return complex(design_point(n2_target(x), k, b).first); },
      "|k^2 (1 - n2)| / b");
  d.impedance = ScalarField::from_function(
      [n2_target, k, b](const Vec3 &x) { return design_point(n2_target(x), k, b).second; },
      "q / |q|");
  return d;
}

BackgroundGreen::BackgroundGreen(const MediumSpec &spec, double wavenumber,
                                 const CollocationOptions &options)
  : k(wavenumber), nodes(make_collocation_grid(spec.box, options.cells)), opts(options)
{
  if (!(k >= 0.0))
  {
    throw ValidationError("invalid_argument", "wavenumber must be non-negative");
  }
  contrast.resize(nodes.size());
  for (std::size_t p = 0; p < nodes.size(); ++p)
  {
    const complex n2 = spec.background_index_sq(nodes.nodes[p]);
    if (n2.imag() < 0.0)
    {
      throw ValidationError("constraint_violation",
                            "background refraction coefficient must satisfy Im n0^2 >= 0");
    }
    contrast[p] = k * k * (n2 - 1.0);
    if (contrast[p] != 0.0)
    {
      trivial = false;
    }
  }
  if (trivial || nodes.size() > opts.dense_limit)
  {
    return;
  }
  const auto n = static_cast<Eigen::Index>(nodes.size());
  CMatrix a = CMatrix::Identity(n, n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index p = 0; p < n; ++p)
  {
    for (Eigen::Index q = 0; q < n; ++q)
    {
      const complex w = p == q && opts.self_cell == SelfCell::omit
                            ? complex(0.0)
                            : cell_potential(nodes.nodes[p], nodes.nodes[q], nodes.cell_volume, k);
      a(p, q) -= w * contrast[q];
    }
  }
  solver = std::make_shared<DenseSolver>(a, opts.min_rcond);
}

namespace
{

// g(z, y), replaced by its cell average when y lies inside the cell ball around z.
complex source_value(const Vec3 &z, const Vec3 &y, double volume, double k)
{
  if ((z - y).norm() < ball_radius(volume))
  {
    return cell_potential(z, y, volume, k) / volume;
  }
  return kernel_g(z, y, k);
}

}  // namespace

CVector BackgroundGreen::on_grid(const Vec3 &source) const
{
  const auto n = static_cast<Eigen::Index>(nodes.size());
  CVector rhs(n);
  for (Eigen::Index p = 0; p < n; ++p)
  {
    rhs[p] = source_value(nodes.nodes[p], source, nodes.cell_volume, k);
  }
  if (trivial)
  {
    return rhs;
  }
  if (solver)
  {
    CVector x = solver->solve(rhs);
    return x;
  }
  LinearOperator apply = [&](const CVector &v, CVector &y) {
    y = v;
#pragma omp parallel for schedule(static)
    for (Eigen::Index p = 0; p < n; ++p)
    {
      complex s = 0.0;
      for (Eigen::Index q = 0; q < n; ++q)
      {
        if (p == q && opts.self_cell == SelfCell::omit)
          continue;
        s += cell_potential(nodes.nodes[p], nodes.nodes[q], nodes.cell_volume, k) * contrast[q] *
             v[q];
      }
      y[p] -= s;
    }
  };
  GmresResult r = gmres(apply, rhs, opts.gmres);
  if (!r.converged)
  {
    std::ostringstream os;
    os << "background Green's function solve stopped at relative residual "
       << r.relative_residual << " after " << r.iterations << " iterations";
    throw SolverError("not_converged", os.str());
  }
  return r.solution;
}

complex BackgroundGreen::correction(const Vec3 &x, const CVector &g_on_grid) const
{
  complex s = 0.0;
  for (std::size_t q = 0; q < nodes.size(); ++q)
  {
    if (contrast[q] == 0.0)
      continue;
    const Vec3 &z = nodes.nodes[q];
    if ((x - z).norm() == 0.0 && opts.self_cell == SelfCell::omit)
      continue;
    s += cell_potential(x, z, nodes.cell_volume, k) * contrast[q] * g_on_grid[q];
  }
  return s;
}

complex BackgroundGreen::operator()(const Vec3 &x, const Vec3 &source) const
{
  const complex g = kernel_g(x, source, k);
  if (trivial)
  {
    return g;
  }
  return g + correction(x, on_grid(source));
}

std::vector<complex> BackgroundGreen::evaluate(const std::vector<Vec3> &points,
                                               const Vec3 &source) const
{
  std::vector<complex> out(points.size());
  if (trivial)
  {
    for (std::size_t i = 0; i < points.size(); ++i)
      out[i] = kernel_g(points[i], source, k);
    return out;
  }
  const CVector gs = on_grid(source);
  const auto n = static_cast<long>(points.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < n; ++i)
  {
    out[i] = kernel_g(points[i], source, k) + correction(points[i], gs);
  }
  return out;
}

complex BackgroundGreen::born_term(const Vec3 &x, const Vec3 &source) const
{
  if (trivial)
  {
    return 0.0;
  }
  CVector g0(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t p = 0; p < nodes.size(); ++p)
  {
    g0[p] = source_value(nodes.nodes[p], source, nodes.cell_volume, k);
  }
  return correction(x, g0);
}

KernelFn BackgroundGreen::kernel() const
{
  auto self = std::make_shared<BackgroundGreen>(*this);
  if (trivial)
  {
    const double kk = k;
    return [kk](const Vec3 &x, const Vec3 &y) { return kernel_g(x, y, kk); };
  }
  struct Cache
  {
    std::mutex lock;
    std::map<std::array<double, 3>, std::shared_ptr<const CVector>> solutions;
  };
  auto cache = std::make_shared<Cache>();
  return [self, cache](const Vec3 &x, const Vec3 &y) {
    const std::array<double, 3> key{y.x(), y.y(), y.z()};
    std::shared_ptr<const CVector> gs;
    {
      std::lock_guard<std::mutex> guard(cache->lock);
      auto it = cache->solutions.find(key);
      if (it != cache->solutions.end())
        gs = it->second;
    }
    if (!gs)
    {
      gs = std::make_shared<const CVector>(self->on_grid(y));
      std::lock_guard<std::mutex> guard(cache->lock);
      cache->solutions.emplace(key, gs);
    }
    return kernel_g(x, y, self->k) + self->correction(x, *gs);
  };
}

}  // namespace smallscat
