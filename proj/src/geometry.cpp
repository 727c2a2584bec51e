// Copyright The smallscat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "smallscat/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <sstream>
#include <utility>

#include <Eigen/Geometry>

namespace smallscat
{

namespace
{

using Edge = std::pair<int, int>;

std::string edge_name(int a, int b)
{
  std::ostringstream os;
  os << "(" << std::min(a, b) << ", " << std::max(a, b) << ")";
  return os.str();
}

}  // namespace

SurfaceMesh::SurfaceMesh(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> panels)
  : vertex_list(std::move(vertices)), panel_list(std::move(panels))
{
  const int nv = static_cast<int>(vertex_list.size());
  if (panel_list.empty())
  {
    throw ValidationError("invalid_mesh", "mesh has no panels");
  }
  for (std::size_t p = 0; p < panel_list.size(); ++p)
  {
    for (int idx : panel_list[p])
    {
      if (idx < 0 || idx >= nv)
      {
        throw ValidationError("invalid_mesh", "panel " + std::to_string(p) +
                                                  " references vertex " + std::to_string(idx) +
                                                  " out of range");
      }
    }
  }

  // Watertight and consistently oriented: every directed edge appears once and its reverse
  // appears once.
  std::map<Edge, int> directed;
  for (const auto &tri : panel_list)
  {
    for (int e = 0; e < 3; ++e)
    {
      const int a = tri[e], b = tri[(e + 1) % 3];
      if (a == b)
      {
        throw ValidationError("invalid_mesh", "degenerate edge " + edge_name(a, b));
      }
      if (++directed[{a, b}] > 1)
      {
        throw ValidationError("mesh_not_watertight",
                              "edge " + edge_name(a, b) +
                                  " is shared by more than two panels or panels are inconsistently "
                                  "oriented");
      }
    }
  }
  for (const auto &[edge, count] : directed)
  {
    if (directed.find({edge.second, edge.first}) == directed.end())
    {
      throw ValidationError("mesh_not_watertight",
                            "edge " + edge_name(edge.first, edge.second) +
                                " belongs to only one panel");
    }
  }

  const std::size_t np = panel_list.size();
  areas.resize(np);
  centroids.resize(np);
  normals.resize(np);
  Vec3 moment = Vec3::Zero();
  for (std::size_t p = 0; p < np; ++p)
  {
    const Vec3 &a = vertex_list[panel_list[p][0]];
    const Vec3 &b = vertex_list[panel_list[p][1]];
    const Vec3 &c = vertex_list[panel_list[p][2]];
    const Vec3 cr = (b - a).cross(c - a);
    const double twice_area = cr.norm();
    if (!(twice_area > 0.0))
    {
      throw ValidationError("invalid_mesh", "panel " + std::to_string(p) + " has zero area");
    }
    areas[p] = 0.5 * twice_area;
    centroids[p] = (a + b + c) / 3.0;
    normals[p] = cr / twice_area;
    total_area += areas[p];
    const double tet = a.dot(b.cross(c)) / 6.0;
    signed_volume += tet;
    moment += tet * (a + b + c) / 4.0;
    max_panel_diameter =
        std::max({max_panel_diameter, (b - a).norm(), (c - b).norm(), (a - c).norm()});
  }
  if (!(signed_volume > 0.0))
  {
    throw ValidationError("mesh_orientation",
                          "signed volume is not positive; panels must be counter-clockwise "
                          "seen from outside");
  }
  volume_centroid = moment / signed_volume;
}

double SurfaceMesh::size() const
{
  // Exact diameter is quadratic in vertices; bound by the bounding-box diagonal for large meshes.
  if (vertex_list.size() > 4000)
  {
    return 0.5 * bounding_box().extent().norm();
  }
  double diam2 = 0.0;
  for (std::size_t i = 0; i < vertex_list.size(); ++i)
  {
    for (std::size_t j = i + 1; j < vertex_list.size(); ++j)
    {
      diam2 = std::max(diam2, (vertex_list[i] - vertex_list[j]).squaredNorm());
    }
  }
  return 0.5 * std::sqrt(diam2);
}

Box SurfaceMesh::bounding_box() const
{
  Box box{vertex_list.front(), vertex_list.front()};
  for (const auto &v : vertex_list)
  {
    box.lo = box.lo.cwiseMin(v);
    box.hi = box.hi.cwiseMax(v);
  }
  return box;
}

SurfaceMesh SurfaceMesh::transformed(const Mat3 &linear, const Vec3 &shift) const
{
  if (!(linear.determinant() > 0.0))
  {
    throw ValidationError("invalid_argument", "mesh transform must preserve orientation");
  }
  std::vector<Vec3> moved;
  moved.reserve(vertex_list.size());
  for (const auto &v : vertex_list)
  {
    moved.push_back(linear * v + shift);
  }
  return SurfaceMesh(std::move(moved), panel_list);
}

double SurfaceMesh::winding_number(const Vec3 &x) const
{
  // Van Oosterom-Strackee solid angle per panel.
  double omega = 0.0;
  for (const auto &tri : panel_list)
  {
    const Vec3 a = vertex_list[tri[0]] - x;
    const Vec3 b = vertex_list[tri[1]] - x;
    const Vec3 c = vertex_list[tri[2]] - x;
    const double la = a.norm(), lb = b.norm(), lc = c.norm();
    const double num = a.dot(b.cross(c));
    const double den = la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
    omega += 2.0 * std::atan2(num, den);
  }
  return omega / (4.0 * pi);
}

SurfaceMesh make_sphere_mesh(double radius, int refinement, const Vec3 &center)
{
  if (!(radius > 0.0))
  {
    throw ValidationError("invalid_argument", "sphere radius must be positive");
  }
  return make_ellipsoid_mesh(Vec3::Constant(radius), refinement, center);
}

SurfaceMesh make_ellipsoid_mesh(const Vec3 &semi_axes, int refinement, const Vec3 &center)
{
  if (!(semi_axes.array() > 0.0).all())
  {
    throw ValidationError("invalid_argument", "ellipsoid semi-axes must be positive");
  }
  if (refinement < 0 || refinement > 8)
  {
    throw ValidationError("resource_limit",
                          "refinement must be in [0, 8], got " + std::to_string(refinement));
  }

  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> verts = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0},
                             {0, -1, t}, {0, 1, t},  {0, -1, -t}, {0, 1, -t},
                             {t, 0, -1}, {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  for (auto &v : verts)
  {
    v.normalize();
  }
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
      {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};

  for (int level = 0; level < refinement; ++level)
  {
    std::map<Edge, int> midpoint;
    auto mid = [&](int a, int b) {
      const Edge key{std::min(a, b), std::max(a, b)};
      auto it = midpoint.find(key);
      if (it != midpoint.end())
      {
        return it->second;
      }
      verts.push_back((verts[a] + verts[b]).normalized());
      const int idx = static_cast<int>(verts.size()) - 1;
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto &f : faces)
    {
      const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }

  // Equal-area correction: the inscribed polyhedron is pushed out radially so that its area
  // is exactly 4 pi. Panel centroids then straddle the sphere instead of lying inside it.
  double unit_area = 0.0;
  for (const auto &f : faces)
  {
    unit_area += 0.5 * (verts[f[1]] - verts[f[0]]).cross(verts[f[2]] - verts[f[0]]).norm();
  }
  const double push = std::sqrt(4.0 * pi / unit_area);
  for (auto &v : verts)
  {
    v = semi_axes.cwiseProduct(push * v) + center;
  }
  return SurfaceMesh(std::move(verts), std::move(faces));
}

SurfaceMesh make_cube_mesh(double edge, int subdivisions, const Vec3 &center)
{
  if (!(edge > 0.0) || subdivisions < 1 || subdivisions > 256)
  {
    throw ValidationError("invalid_argument", "cube edge must be positive and subdivisions in "
                                              "[1, 256]");
  }
  const int n = subdivisions;
  std::vector<Vec3> verts;
  std::map<std::array<int, 3>, int> index;
  auto vertex = [&](int i, int j, int k) {
    const std::array<int, 3> key{i, j, k};
    auto it = index.find(key);
    if (it != index.end())
    {
      return it->second;
    }
    verts.push_back(center + edge * (Vec3(i, j, k) / n - Vec3::Constant(0.5)));
    const int idx = static_cast<int>(verts.size()) - 1;
    index.emplace(key, idx);
    return idx;
  };

  std::vector<std::array<int, 3>> faces;
  // Each face is spanned by (u, v) with u x v pointing outward.
  for (int axis = 0; axis < 3; ++axis)
  {
    for (int side = 0; side < 2; ++side)
    {
      const int u_axis = (axis + 1) % 3, v_axis = (axis + 2) % 3;
      for (int a = 0; a < n; ++a)
      {
        for (int b = 0; b < n; ++b)
        {
          auto corner = [&](int da, int db) {
            std::array<int, 3> c{};
            c[axis] = side * n;
            c[u_axis] = a + da;
            c[v_axis] = b + db;
            return vertex(c[0], c[1], c[2]);
          };
          const int p00 = corner(0, 0), p10 = corner(1, 0), p11 = corner(1, 1),
                    p01 = corner(0, 1);
          if (side == 1)
          {
            faces.push_back({p00, p10, p11});
            faces.push_back({p00, p11, p01});
          }
          else
          {
            faces.push_back({p00, p11, p10});
            faces.push_back({p00, p01, p11});
          }
        }
      }
    }
  }
  return SurfaceMesh(std::move(verts), std::move(faces));
}

double mesh_volume(const SurfaceMesh &mesh) { return mesh.volume(); }

double mesh_area(const SurfaceMesh &mesh) { return mesh.area(); }

SurfaceMesh read_mesh(std::istream &in)
{
  long nv = -1, nf = -1;
  if (!(in >> nv >> nf) || nv < 3 || nf < 4)
  {
    throw ValidationError("mesh_parse", "mesh header must be 'V F' with V >= 3 and F >= 4");
  }
  std::vector<Vec3> verts(static_cast<std::size_t>(nv));
  for (long i = 0; i < nv; ++i)
  {
    if (!(in >> verts[i].x() >> verts[i].y() >> verts[i].z()))
    {
      throw ValidationError("mesh_parse", "could not read vertex " + std::to_string(i));
    }
  }
  std::vector<std::array<int, 3>> faces(static_cast<std::size_t>(nf));
  for (long i = 0; i < nf; ++i)
  {
    if (!(in >> faces[i][0] >> faces[i][1] >> faces[i][2]))
    {
      throw ValidationError("mesh_parse", "could not read panel " + std::to_string(i));
    }
  }
  return SurfaceMesh(std::move(verts), std::move(faces));
}

SurfaceMesh read_mesh_file(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ValidationError("file_not_found", "cannot open mesh file '" + path + "'");
  }
  return read_mesh(in);
}

void write_mesh(std::ostream &out, const SurfaceMesh &mesh)
{
  out << mesh.vertices().size() << ' ' << mesh.panel_count() << '\n';
  out << std::setprecision(17);
  for (const auto &v : mesh.vertices())
  {
    out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  }
  for (const auto &f : mesh.panels())
  {
    out << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
  }
}

VolumeGrid make_volume_grid(const SurfaceMesh &mesh, int resolution)
{
  if (resolution < 1 || resolution > 400)
  {
    throw ValidationError("invalid_argument", "volume grid resolution must be in [1, 400]");
  }
  const Box box = mesh.bounding_box();
  const Vec3 ext = box.extent();
  const double h = ext.maxCoeff() / resolution;
  std::array<int, 3> counts{};
  Vec3 origin;
  for (int d = 0; d < 3; ++d)
  {
    counts[d] = std::max(1, static_cast<int>(std::ceil(ext[d] / h - 1e-9)));
    // Lattice centered on the box so that symmetric bodies get symmetric grids.
    origin[d] = box.center()[d] - 0.5 * counts[d] * h;
  }

  std::vector<Vec3> candidates;
  candidates.reserve(static_cast<std::size_t>(counts[0]) * counts[1] * counts[2]);
  for (int i = 0; i < counts[0]; ++i)
  {
    for (int j = 0; j < counts[1]; ++j)
    {
      for (int k = 0; k < counts[2]; ++k)
      {
        candidates.push_back(origin + h * Vec3(i + 0.5, j + 0.5, k + 0.5));
      }
    }
  }
  std::vector<char> inside(candidates.size(), 0);
#pragma omp parallel for schedule(dynamic, 64)
  for (long c = 0; c < static_cast<long>(candidates.size()); ++c)
  {
    inside[c] = mesh.contains(candidates[c]) ? 1 : 0;
  }

  VolumeGrid grid;
  grid.spacing = h;
  grid.cell_volume = h * h * h;
  for (std::size_t c = 0; c < candidates.size(); ++c)
  {
    if (inside[c])
    {
      grid.cells.push_back(candidates[c]);
    }
  }
  if (grid.cells.empty())
  {
    throw ValidationError("invalid_argument", "volume grid resolution too coarse: no interior "
                                              "cells");
  }
  return grid;
}

Mat3 rotation_matrix(const Vec3 &axis, double angle)
{
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

}  // namespace smallscat
