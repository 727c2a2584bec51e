// Copyright The smallscat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "smallscat/potential_ops.hpp"

#include <cmath>

namespace smallscat
{

namespace
{

// (e^{ikr} - 1) / r, well behaved as r -> 0.
complex expm1_over_r(double k, double r)
{
  const double x = k * r;
  if (std::abs(x) < 1e-4)
  {
    return I * k * (1.0 + 0.5 * I * x - x * x / 6.0);
  }
  return (std::exp(I * x) - 1.0) / r;
}

complex triangle_integral(const Vec3 &a, const Vec3 &b, const Vec3 &c, const Vec3 &x, double k,
                          int depth)
{
  const Vec3 centroid = (a + b + c) / 3.0;
  const double area = 0.5 * (b - a).cross(c - a).norm();
  const double diam = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
  const double r = (x - centroid).norm();
  if (r > 3.0 * diam || depth >= 7)
  {
    if (r < 1e-14 * diam)
    {
      return disc_self_integral(area, k);
    }
    return area * std::exp(I * (k * r)) / (4.0 * pi * r);
  }
  const Vec3 ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
  return triangle_integral(a, ab, ca, x, k, depth + 1) +
         triangle_integral(b, bc, ab, x, k, depth + 1) +
         triangle_integral(c, ca, bc, x, k, depth + 1) +
         triangle_integral(ab, bc, ca, x, k, depth + 1);
}

}  // namespace

complex kernel_g(const Vec3 &x, const Vec3 &y, double k)
{
  const double r = (x - y).norm();
  if (!(r > 0.0))
  {
    throw ValidationError("singular_evaluation", "kernel evaluated at coincident points");
  }
  return std::exp(I * (k * r)) / (4.0 * pi * r);
}

CVec3 kernel_g_gradient(const Vec3 &x, const Vec3 &y, double k)
{
  const Vec3 d = x - y;
  const double r = d.norm();
  if (!(r > 0.0))
  {
    throw ValidationError("singular_evaluation", "kernel gradient evaluated at coincident points");
  }
  const complex g = std::exp(I * (k * r)) / (4.0 * pi * r);
  const complex radial = g * (I * k - 1.0 / r) / r;
  return radial * d.cast<complex>();
}

complex disc_self_integral(double area, double k)
{
  // (1/4pi) int_0^R 2 pi e^{ikr} dr.
  const double radius = std::sqrt(area / pi);
  if (k * radius < 1e-8)
  {
    return complex(0.5 * radius, 0.0) + I * (k * radius * radius / 4.0);
  }
  return (std::exp(I * (k * radius)) - 1.0) / (2.0 * I * k);
}

complex panel_integral_g(const SurfaceMesh &mesh, std::size_t panel, const Vec3 &x, double k)
{
  const auto &tri = mesh.panels()[panel];
  const auto &v = mesh.vertices();
  return triangle_integral(v[tri[0]], v[tri[1]], v[tri[2]], x, k, 0);
}

complex single_layer(const SurfaceMesh &mesh, const PanelDensity &density, double k,
                     const Vec3 &x)
{
  if (static_cast<std::size_t>(density.size()) != mesh.panel_count())
  {
    throw ValidationError("invalid_argument", "density length must equal panel count");
  }
  complex sum = 0.0;
  for (std::size_t t = 0; t < mesh.panel_count(); ++t)
  {
    if (density[t] == 0.0)
    {
      continue;
    }
    const double r = (x - mesh.panel_centroid(t)).norm();
    if (r < 1e-12 * mesh.max_panel_size())
    {
      sum += disc_self_integral(mesh.panel_area(t), k) * density[t];
    }
    else
    {
      sum += panel_integral_g(mesh, t, x, k) * density[t];
    }
  }
  return sum;
}

PanelSet make_panel_set(const std::vector<const SurfaceMesh *> &meshes)
{
  PanelSet set;
  for (std::size_t b = 0; b < meshes.size(); ++b)
  {
    const SurfaceMesh &mesh = *meshes[b];
    set.offset.push_back(set.size());
    for (std::size_t p = 0; p < mesh.panel_count(); ++p)
    {
      set.centroid.push_back(mesh.panel_centroid(p));
      set.normal.push_back(mesh.panel_normal(p));
      set.area.push_back(mesh.panel_area(p));
      set.body.push_back(static_cast<int>(b));
    }
  }
  set.offset.push_back(set.size());
  return set;
}

BoundaryOperatorMatrix assemble_A(const SurfaceMesh &mesh, double k, A0Diagonal diagonal)
{
  return assemble_A(make_panel_set({&mesh}), k, diagonal);
}

BoundaryOperatorMatrix assemble_A(const PanelSet &panels, double k, A0Diagonal diagonal)
{
  const auto n = static_cast<Eigen::Index>(panels.size());
  BoundaryOperatorMatrix op;
  op.wavenumber = k;
  op.entries.resize(n, n);
  // K0(s,t) = 2 dg0/dN_s = -2 N_s.(s-t) / (4 pi r^3); stored as kernel * w_t.
  Eigen::MatrixXd static_kernel(n, n);

#pragma omp parallel for schedule(static)
  for (Eigen::Index s = 0; s < n; ++s)
  {
    const Vec3 &xs = panels.centroid[s];
    const Vec3 &ns = panels.normal[s];
    for (Eigen::Index t = 0; t < n; ++t)
    {
      if (s == t)
      {
        static_kernel(s, t) = 0.0;
        op.entries(s, t) = 0.0;
        continue;
      }
      const Vec3 d = xs - panels.centroid[t];
      const double r = d.norm();
      const double proj = ns.dot(d);
      const double k0 = -2.0 * proj / (4.0 * pi * r * r * r);
      static_kernel(s, t) = k0;
      complex remainder = 0.0;
      if (k > 0.0)
      {
        // 2 N.(s-t)/(4 pi r^3) [(ikr - 1) e^{ikr} + 1], bounded as r -> 0.
        const double kr = k * r;
        const complex factor = (I * kr - 1.0) * std::exp(I * kr) + 1.0;
        remainder = 2.0 * proj / (4.0 * pi * r * r * r) * factor;
      }
      op.entries(s, t) = (k0 + remainder) * panels.area[t];
    }
  }

  if (diagonal == A0Diagonal::column_identity)
  {
    // Within each body: sum_s w_s K0(s,t) = -1.
    for (Eigen::Index t = 0; t < n; ++t)
    {
      const int body = panels.body[t];
      double column = 0.0;
      for (auto s = static_cast<Eigen::Index>(panels.offset[body]);
           s < static_cast<Eigen::Index>(panels.offset[body + 1]); ++s)
      {
        if (s != t)
        {
          column += panels.area[s] * static_kernel(s, t);
        }
      }
      const double self_kernel = (-1.0 - column) / panels.area[t];
      op.entries(t, t) = self_kernel * panels.area[t];
    }
  }
  return op;
}

CMatrix assemble_single_layer(const PanelSet &panels, double k)
{
  const auto n = static_cast<Eigen::Index>(panels.size());
  CMatrix s_mat(n, n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index s = 0; s < n; ++s)
  {
    for (Eigen::Index t = 0; t < n; ++t)
    {
      if (s == t)
      {
        s_mat(s, t) = disc_self_integral(panels.area[t], k);
      }
      else
      {
        const double r = (panels.centroid[s] - panels.centroid[t]).norm();
        s_mat(s, t) = panels.area[t] * std::exp(I * (k * r)) / (4.0 * pi * r);
      }
    }
  }
  return s_mat;
}

CMatrix assemble_single_layer(const SurfaceMesh &mesh, double k)
{
  return assemble_single_layer(make_panel_set({&mesh}), k);
}

complex cell_potential(const Vec3 &x, const Vec3 &y, double volume, double k)
{
  const double r = (x - y).norm();
  const double radius = std::cbrt(3.0 * volume / (4.0 * pi));
  double static_part;
  if (r >= radius)
  {
    static_part = volume / (4.0 * pi * r);
  }
  else
  {
    static_part = (3.0 * radius * radius - r * r) / 6.0;
  }
  return static_part + volume * expm1_over_r(k, r) / (4.0 * pi);
}

CVec3 cell_potential_gradient(const Vec3 &x, const Vec3 &y, double volume, double k)
{
  const Vec3 d = x - y;
  const double r = d.norm();
  const double radius = std::cbrt(3.0 * volume / (4.0 * pi));
  Vec3 static_part;
  if (r >= radius)
  {
    static_part = -volume * d / (4.0 * pi * r * r * r);
  }
  else
  {
    static_part = -d / 3.0;
  }
  CVec3 grad = static_part.cast<complex>();
  if (k > 0.0 && r > 0.0)
  {
    // d/dr [(e^{ikr} - 1)/r] = (ikr e^{ikr} - e^{ikr} + 1)/r^2.
    const double kr = k * r;
    complex dr;
    if (kr < 1e-4)
    {
      dr = -0.5 * k * k + (-I * k * k * k * r / 3.0);
    }
    else
    {
      dr = ((I * kr - 1.0) * std::exp(I * kr) + 1.0) / (r * r);
    }
    grad += (volume * dr / (4.0 * pi * r)) * d.cast<complex>();
  }
  return grad;
}

complex volume_potential(const VolumeGrid &grid, const CVector &u_values, double k,
                         complex kappa, const Vec3 &x)
{
  if (static_cast<std::size_t>(u_values.size()) != grid.size())
  {
    throw ValidationError("invalid_argument", "cell values length must equal cell count");
  }
  if (kappa == 0.0)
  {
    return 0.0;
  }
  complex sum = 0.0;
  for (std::size_t c = 0; c < grid.size(); ++c)
  {
    sum += cell_potential(x, grid.cells[c], grid.cell_volume, k) * u_values[c];
  }
  return kappa * sum;
}

PanelDensity normal_derivative_volume_potential(const VolumeGrid &grid, const CVector &u_values,
                                                double k, complex kappa,
                                                const SurfaceMesh &mesh)
{
  if (static_cast<std::size_t>(u_values.size()) != grid.size())
  {
    throw ValidationError("invalid_argument", "cell values length must equal cell count");
  }
  const auto n = static_cast<Eigen::Index>(mesh.panel_count());
  PanelDensity out = PanelDensity::Zero(n);
  if (kappa == 0.0)
  {
    return out;
  }
#pragma omp parallel for schedule(static)
  for (Eigen::Index s = 0; s < n; ++s)
  {
    const Vec3 &xs = mesh.panel_centroid(s);
    const CVec3 ns = mesh.panel_normal(s).cast<complex>();
    complex sum = 0.0;
    for (std::size_t c = 0; c < grid.size(); ++c)
    {
      sum += ns.dot(cell_potential_gradient(xs, grid.cells[c], grid.cell_volume, k)) *
             u_values[c];
    }
    out[s] = kappa * sum;
  }
  return out;
}

}  // namespace smallscat
